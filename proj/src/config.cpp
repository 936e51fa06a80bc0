#include "urbaneq/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <map>
#include <set>

#include "urbaneq/error.hpp"

namespace urbaneq {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& what) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) throw Error(ErrorKind::Config, what);
  throw Error(ErrorKind::Config, "line " + std::to_string(m.line + 1) + ": " + what);
}

void require_map(const YAML::Node& node, const std::string& name) {
  if (!node.IsMap()) fail(node, name + " must be a mapping");
}

void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) {
  require_map(node, section);
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + section);
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) fail(node, name + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "invalid value for " + name);
  }
}

template <class T>
T get(const YAML::Node& parent, const std::string& key, T fallback) {
  const YAML::Node n = parent[key];
  return n ? scalar<T>(n, key) : fallback;
}

std::vector<double> numbers(const YAML::Node& node, const std::string& name, std::size_t count = 0) {
  if (!node.IsSequence()) fail(node, name + " must be a list");
  std::vector<double> out;
  for (const auto& x : node) out.push_back(scalar<double>(x, name));
  if (count && out.size() != count) fail(node, name + " needs " + std::to_string(count) + " numbers");
  return out;
}

Point point(const YAML::Node& node, const std::string& name) {
  const auto v = numbers(node, name, 2);
  return {v[0], v[1]};
}

void range(const YAML::Node& node, const std::string& name, double& lo, double& hi, int& n) {
  const auto v = numbers(node, name, 3);
  lo = v[0];
  hi = v[1];
  if (v[2] != std::floor(v[2])) fail(node, name + " point count must be an integer");
  n = static_cast<int>(v[2]);
}

std::string resolve(const std::string& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (std::filesystem::path(base) / path).string();
}

Variant parse_variant(const YAML::Node& node) {
  const auto s = scalar<std::string>(node, "variant");
  if (s == "baseline") return Variant::baseline;
  if (s == "home_consumption") return Variant::home_consumption;
  if (s == "two_sector") return Variant::two_sector;
  fail(node, "unknown variant '" + s + "'");
}

DomainGrid parse_domain(const YAML::Node& node, BBox bbox, int nx, int ny, const std::string& base) {
  if (!node) return DomainGrid::build(bbox, nx, ny, [](Point) { return true; });
  require_map(node, "domain");
  const auto kind = scalar<std::string>(node["kind"] ? node["kind"] : node, "domain.kind");
  if (kind == "full") {
    check_keys(node, "domain", {"kind"});
    return DomainGrid::build(bbox, nx, ny, [](Point) { return true; });
  }
  if (kind == "disk") {
    check_keys(node, "domain", {"kind", "center", "radius"});
    const Point c = node["center"] ? point(node["center"], "center") : Point{};
    const double r = get<double>(node, "radius", 1.0);
    if (!(r > 0.0)) fail(node["radius"], "radius must be positive");
    return DomainGrid::build_levelset(bbox, nx, ny, [c, r](Point p) { return std::hypot(p.x - c.x, p.y - c.y) - r; });
  }
  if (kind == "polygon") {
    check_keys(node, "domain", {"kind", "vertices"});
    if (!node["vertices"] || !node["vertices"].IsSequence()) fail(node, "polygon needs a vertices list");
    std::vector<Point> poly;
    for (const auto& v : node["vertices"]) poly.push_back(point(v, "vertex"));
    if (poly.size() < 3) fail(node["vertices"], "polygon needs at least three vertices");
    return DomainGrid::build(bbox, nx, ny, [poly](Point p) {
      bool in = false;
      for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        if ((poly[i].y > p.y) != (poly[j].y > p.y) &&
            p.x < (poly[j].x - poly[i].x) * (p.y - poly[i].y) / (poly[j].y - poly[i].y) + poly[i].x)
          in = !in;
      }
      return in;
    });
  }
  if (kind == "mask_file") {
    check_keys(node, "domain", {"kind", "path"});
    const Raster r = read_raster(resolve(base, get<std::string>(node, "path", "")));
    if (r.nx != nx || r.ny != ny) fail(node, "mask raster size does not match the resolution");
    std::vector<std::uint8_t> mask(r.values.size());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = r.values[i] > 0.5 ? 1 : 0;
    return DomainGrid::from_mask(bbox, nx, ny, std::move(mask));
  }
  fail(node, "unknown domain kind '" + kind + "'");
}

AmenityField parse_amenity(const YAML::Node& node, const DomainGrid& grid, const std::string& base) {
  if (!node) return amenity_from_function(grid, [](Point) { return 1.0; });
  require_map(node, "amenity");
  const auto kind = scalar<std::string>(node["kind"] ? node["kind"] : node, "amenity.kind");
  if (kind == "constant") {
    check_keys(node, "amenity", {"kind", "value"});
    const double v = get<double>(node, "value", 1.0);
    return amenity_from_function(grid, [v](Point) { return v; });
  }
  if (kind == "linear") {
    check_keys(node, "amenity", {"kind", "base", "gradient"});
    const double b = get<double>(node, "base", 1.0);
    const Point g = node["gradient"] ? point(node["gradient"], "gradient") : Point{};
    return amenity_from_function(grid, [b, g](Point p) { return b + g.x * p.x + g.y * p.y; });
  }
  if (kind == "gaussian") {
    check_keys(node, "amenity", {"kind", "base", "peak", "center", "width"});
    const double b = get<double>(node, "base", 1.0), pk = get<double>(node, "peak", 1.0);
    const double w = get<double>(node, "width", 0.25);
    const Point c = node["center"] ? point(node["center"], "center") : Point{};
    if (!(w > 0.0)) fail(node["width"], "width must be positive");
    return amenity_from_function(grid, [=](Point p) {
      const double r2 = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y);
      return b + pk * std::exp(-r2 / (2.0 * w * w));
    });
  }
  if (kind == "file") {
    check_keys(node, "amenity", {"kind", "path"});
    return amenity_from_raster(grid, read_raster(resolve(base, get<std::string>(node, "path", ""))));
  }
  fail(node, "unknown amenity kind '" + kind + "'");
}

void parse_params(const YAML::Node& node, ModelParams& p) {
  check_keys(node, "params", {"sigma", "alpha", "beta", "delta", "tau", "L", "variant", "mu", "beta_tilde"});
  p.sigma = get(node, "sigma", p.sigma);
  p.alpha = get(node, "alpha", p.alpha);
  p.beta = get(node, "beta", p.beta);
  p.delta = get(node, "delta", p.delta);
  p.tau = get(node, "tau", p.tau);
  p.L = get(node, "L", p.L);
  if (node["variant"]) p.variant = parse_variant(node["variant"]);
  p.mu = get(node, "mu", p.mu);
  p.beta_tilde = get(node, "beta_tilde", p.beta_tilde);
  try {
    p.validate();
  } catch (const Error& e) {
    fail(node, e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorKind::Config, source + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  cfg.source = source;
  try {
    if (!root || root.IsNull()) throw Error(ErrorKind::Config, "empty configuration");
    check_keys(root, "configuration",
               {"geography", "params", "solver", "existence", "probe", "sweep", "enumerate", "seed", "threads"});
    cfg.seed = get<std::uint64_t>(root, "seed", cfg.seed);
    cfg.threads = get<int>(root, "threads", 0);
    if (cfg.threads < 0) fail(root["threads"], "threads must be non-negative");
    if (root["params"]) parse_params(root["params"], cfg.params);

    std::map<int, int> id_index;
    if (const YAML::Node g = root["geography"]) {
      check_keys(g, "geography", {"bbox", "resolution", "domain", "amenity", "metric", "sites", "trade"});
      const auto bb = g["bbox"] ? numbers(g["bbox"], "bbox", 4) : std::vector<double>{0, 0, 1, 1};
      const BBox bbox{bb[0], bb[1], bb[2], bb[3]};
      if (!(bbox.xmax > bbox.xmin && bbox.ymax > bbox.ymin)) fail(g["bbox"], "bbox must have positive extent");
      int nx = 64, ny = 64;
      if (const YAML::Node r = g["resolution"]) {
        if (r.IsScalar()) {
          nx = ny = scalar<int>(r, "resolution");
        } else {
          const auto v = numbers(r, "resolution", 2);
          nx = static_cast<int>(v[0]);
          ny = static_cast<int>(v[1]);
        }
        if (nx < 2 || ny < 2) fail(r, "resolution must be at least 2 per axis");
      }
      auto grid = std::make_shared<DomainGrid>(parse_domain(g["domain"], bbox, nx, ny, base_dir));
      auto amenity = std::make_shared<AmenityField>(parse_amenity(g["amenity"], *grid, base_dir));

      const YAML::Node sites_node = g["sites"];
      if (!sites_node || !sites_node.IsSequence() || sites_node.size() == 0) fail(g, "geography needs a sites list");
      std::vector<Site> sites;
      std::vector<double> scales;
      bool any_scale = false;
      for (const auto& s : sites_node) {
        check_keys(s, "site", {"id", "position", "productivity", "scale"});
        Site site;
        site.id = get<int>(s, "id", static_cast<int>(sites.size()));
        if (!s["position"]) fail(s, "site needs a position");
        site.position = point(s["position"], "position");
        site.productivity = get<double>(s, "productivity", 1.0);
        if (!(site.productivity > 0.0)) fail(s, "productivity must be positive");
        if (id_index.count(site.id)) fail(s, "duplicate site id " + std::to_string(site.id));
        if (grid->cell_of(site.position) < 0 || !grid->inside(static_cast<std::size_t>(grid->cell_of(site.position))))
          fail(s, "site " + std::to_string(site.id) + " is not on an inside cell");
        any_scale = any_scale || s["scale"];
        scales.push_back(get<double>(s, "scale", 1.0));
        id_index[site.id] = static_cast<int>(sites.size());
        sites.push_back(site);
      }

      DistanceSystem metric;
      if (const YAML::Node m = g["metric"]) {
        const auto kind = scalar<std::string>(m.IsMap() ? m["kind"] : m, "metric");
        if (m.IsMap()) check_keys(m, "metric", {"kind"});
        if (kind == "euclidean") {
          if (any_scale) fail(m, "site scales need metric scaled_euclidean");
        } else if (kind == "scaled_euclidean") {
          metric.kind = MetricKind::scaled_euclidean;
          metric.scales = scales;
        } else {
          fail(m, "unknown metric '" + kind + "'");
        }
      }

      TradeCostMatrix trade;
      const YAML::Node t = g["trade"];
      const std::string tkind = t ? scalar<std::string>(t["kind"] ? t["kind"] : t, "trade.kind") : "metric";
      if (t) check_keys(t, "trade", {"kind", "path"});
      if (tkind == "metric") {
        trade = trade_costs_from_metric(sites, metric, cfg.params.tau);
      } else if (tkind == "csv") {
        trade = read_trade_csv(resolve(base_dir, get<std::string>(t, "path", "")));
        if (trade.n != sites.size()) fail(t, "trade matrix size does not match the site count");
      } else {
        fail(t, "unknown trade kind '" + tkind + "'");
      }
      cfg.geography = Geography::create(grid, amenity, std::move(sites), std::move(metric), std::move(trade));
      cfg.has_geography = true;
    }

    if (const YAML::Node s = root["solver"]) {
      check_keys(s, "solver", {"damping", "tol", "max_iter", "k_shrink", "anchor", "active", "lambda_hat_init"});
      cfg.solver.damping = get(s, "damping", cfg.solver.damping);
      cfg.solver.tol = get(s, "tol", cfg.solver.tol);
      cfg.solver.max_iter = get(s, "max_iter", cfg.solver.max_iter);
      cfg.solver.k_shrink = get(s, "k_shrink", cfg.solver.k_shrink);
      cfg.solver.anchor = get(s, "anchor", cfg.solver.anchor);
      if (!(cfg.solver.damping > 0.0 && cfg.solver.damping <= 1.0)) fail(s, "damping must be in (0, 1]");
      if (!(cfg.solver.tol > 0.0)) fail(s, "tol must be positive");
      if (cfg.solver.max_iter < 1) fail(s, "max_iter must be at least 1");
      if (!(cfg.solver.k_shrink > 0.0 && cfg.solver.k_shrink < 1.0)) fail(s, "k_shrink must be in (0, 1)");
      if (const YAML::Node a = s["active"]) {
        for (double id : numbers(a, "active")) {
          const auto it = id_index.find(static_cast<int>(id));
          if (it == id_index.end()) fail(a, "active lists unknown site id " + std::to_string(static_cast<int>(id)));
          cfg.active.push_back(it->second);
        }
      }
      if (const YAML::Node l = s["lambda_hat_init"]) cfg.solver.lambda_hat_init = numbers(l, "lambda_hat_init");
    }
    if (cfg.active.empty())
      for (std::size_t i = 0; i < cfg.geography.size(); ++i) cfg.active.push_back(static_cast<int>(i));
    if (cfg.solver.anchor < 0 || (cfg.has_geography && cfg.solver.anchor >= static_cast<int>(cfg.active.size())))
      fail(root["solver"], "anchor must index the active list");

    cfg.existence.seed = cfg.seed;
    cfg.existence.k_shrink = cfg.solver.k_shrink;
    if (const YAML::Node e = root["existence"]) {
      check_keys(e, "existence", {"k_shrink", "eta_samples", "use_sharper_trade_bound", "eta"});
      cfg.existence.k_shrink = get(e, "k_shrink", cfg.existence.k_shrink);
      cfg.existence.eta_samples = get(e, "eta_samples", cfg.existence.eta_samples);
      cfg.existence.use_sharper_trade_bound = get(e, "use_sharper_trade_bound", cfg.existence.use_sharper_trade_bound);
      if (e["eta"]) cfg.existence.eta_override = scalar<double>(e["eta"], "eta");
      if (!(cfg.existence.k_shrink > 0.0 && cfg.existence.k_shrink < 1.0)) fail(e, "k_shrink must be in (0, 1)");
      if (cfg.existence.eta_samples < 1) fail(e, "eta_samples must be at least 1");
    }

    if (const YAML::Node p = root["probe"]) {
      check_keys(p, "probe", {"starts"});
      cfg.probe_starts = get(p, "starts", 0);
      if (cfg.probe_starts < 0) fail(p, "starts must be non-negative");
    }

    if (const YAML::Node s = root["sweep"]) {
      check_keys(s, "sweep", {"panel", "alpha", "beta", "sigma", "sigma_range", "beta_fixed"});
      SweepSpec& sp = cfg.sweep;
      if (s["panel"]) {
        const auto panel = scalar<std::string>(s["panel"], "panel");
        if (panel == "alpha_beta") {
          sp.panel = SweepPanel::alpha_beta;
        } else if (panel == "alpha_sigma") {
          sp.panel = SweepPanel::alpha_sigma;
        } else {
          fail(s["panel"], "unknown panel '" + panel + "'");
        }
      }
      if (s["alpha"]) range(s["alpha"], "alpha", sp.alpha_min, sp.alpha_max, sp.n_alpha);
      if (s["beta"]) range(s["beta"], "beta", sp.beta_min, sp.beta_max, sp.n_beta);
      if (s["sigma_range"]) range(s["sigma_range"], "sigma_range", sp.sigma_min, sp.sigma_max, sp.n_sigma);
      sp.sigma = get(s, "sigma", sp.sigma);
      sp.beta_fixed = get(s, "beta_fixed", sp.beta_fixed);
    }

    cfg.enumerate.seed = cfg.seed;
    cfg.enumerate.existence = cfg.existence;
    cfg.enumerate.solver = cfg.solver;
    if (const YAML::Node e = root["enumerate"]) {
      check_keys(e, "enumerate", {"sizes", "max_subsets", "check_existence"});
      if (e["sizes"]) {
        cfg.enumerate.sizes.clear();
        for (double v : numbers(e["sizes"], "sizes")) cfg.enumerate.sizes.push_back(static_cast<int>(v));
      }
      cfg.enumerate.max_subsets = get(e, "max_subsets", cfg.enumerate.max_subsets);
      cfg.enumerate.check_existence = get(e, "check_existence", cfg.enumerate.check_existence);
      if (cfg.enumerate.max_subsets < 1) fail(e, "max_subsets must be positive");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw Error(ErrorKind::Config, source + ": " + e.detail());
    throw Error(ErrorKind::Config, source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), path, dir.empty() ? "." : dir.string());
}

}  // namespace urbaneq
