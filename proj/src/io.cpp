#include "urbaneq/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "urbaneq/error.hpp"

namespace urbaneq::io {

namespace {

// Fixed palettes for reproducible maps.
constexpr const char* kSitePalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                        "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295"};
constexpr const char* kCategoryPalette[] = {"#d9d9d9", "#9e9e9e", "#fdd49e", "#fc8d59", "#9ecae1", "#3182bd"};
constexpr const char* kCategoryNames[] = {"spread",          "spread, labor unique",    "knife edge",
                                          "knife edge, labor unique", "multiple", "multiple, labor unique"};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt_short(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

Json at_or_null(const std::vector<double>& v, std::size_t i) { return i < v.size() ? number(v[i]) : Json(); }

Json params_json(const ModelParams& p) {
  Json j;
  j["sigma"] = p.sigma;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["delta"] = p.delta;
  j["tau"] = p.tau;
  j["L"] = p.L;
  j["variant"] = to_string(p.variant);
  if (p.variant == Variant::two_sector) {
    j["mu"] = p.mu;
    j["beta_tilde"] = p.beta_tilde;
  }
  return j;
}

Json ints(const std::vector<int>& v) {
  Json a = Json::array();
  for (int x : v) a.push_back(x);
  return a;
}

Json doubles(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string join(const std::vector<int>& v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
  return s;
}

struct Frame {
  BBox bbox;
  double scale = 1.0;
  int width = 0, height = 0;
  double px(double x) const { return (x - bbox.xmin) * scale; }
  double py(double y) const { return (bbox.ymax - y) * scale; }
};

Frame frame(const BBox& b, int pixel_width) {
  Frame f;
  f.bbox = b;
  f.scale = pixel_width / (b.xmax - b.xmin);
  f.width = pixel_width;
  f.height = static_cast<int>(std::lround((b.ymax - b.ymin) * f.scale));
  return f;
}

}  // namespace

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

Json tessellation_json(const DomainGrid& grid, const std::vector<int>& labels) {
  Json j;
  const BBox& b = grid.bbox();
  j["bbox"] = {b.xmin, b.ymin, b.xmax, b.ymax};
  j["nx"] = grid.nx();
  j["ny"] = grid.ny();
  Json runs = Json::array();
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t k = i;
    while (k < labels.size() && labels[k] == labels[i]) ++k;
    runs.push_back({labels[i], k - i});
    i = k;
  }
  j["runs"] = std::move(runs);
  return j;
}

Json solution_json(const EquilibriumSolution& sol, const Geography& geo) {
  Json j;
  j["format"] = "urbaneq-solution";
  j["version"] = 1;
  j["status"] = to_string(sol.status);
  j["converged"] = sol.converged();
  j["iterations"] = sol.iterations;
  j["exited_feasible"] = sol.exited_feasible;
  j["levels_recovered"] = sol.levels_recovered;
  j["note"] = sol.note;
  j["params"] = params_json(sol.params);
  j["anchor"] = sol.anchor;
  j["V"] = sol.levels_recovered ? number(sol.V) : Json();
  Json sites = Json::array();
  for (std::size_t k = 0; k < sol.site_ids.size(); ++k) {
    const Site& s = geo.sites[static_cast<std::size_t>(sol.site_ids[k])];
    Json e;
    e["id"] = s.id;
    e["index"] = sol.site_ids[k];
    e["x"] = s.position.x;
    e["y"] = s.position.y;
    e["productivity"] = s.productivity;
    e["active"] = k < sol.tessellation.cell_measure.size() && sol.tessellation.active(k);
    e["lambda"] = at_or_null(sol.lambda, k);
    e["lambda_hat"] = at_or_null(sol.lambda_hat, k);
    e["lambda_tilde"] = at_or_null(sol.lambda_tilde, k);
    e["L"] = at_or_null(sol.L, k);
    e["w"] = at_or_null(sol.w, k);
    e["P"] = at_or_null(sol.P, k);
    e["B"] = at_or_null(sol.B, k);
    e["V_i"] = at_or_null(sol.V_i, k);
    e["area"] = at_or_null(sol.tessellation.cell_measure, k);
    sites.push_back(std::move(e));
  }
  j["sites"] = std::move(sites);
  Json vacant = Json::array();
  for (std::size_t p = 0; p < geo.size(); ++p) {
    if (std::find(sol.site_ids.begin(), sol.site_ids.end(), static_cast<int>(p)) != sol.site_ids.end()) continue;
    const Site& s = geo.sites[p];
    vacant.push_back({{"id", s.id}, {"index", p}, {"x", s.position.x}, {"y", s.position.y}, {"productivity", s.productivity}});
  }
  j["vacant"] = std::move(vacant);
  Json r;
  r["lambda_eq"] = number(sol.residuals.lambda_eq);
  r["market"] = number(sol.residuals.market);
  r["welfare_spread"] = number(sol.residuals.welfare_spread);
  r["population_slack"] = number(sol.residuals.population_slack);
  r["identity_spread"] = number(sol.residuals.identity_spread);
  j["residuals"] = std::move(r);
  if (!sol.tessellation.labels.empty()) j["tessellation"] = tessellation_json(*geo.grid, sol.tessellation.labels);
  return j;
}

Json existence_json(const ExistenceReport& rep) {
  Json j;
  j["hypothesis_value"] = number(rep.hypothesis_value);
  j["precondition"] = rep.precondition;
  j["eta_hat"] = number(rep.eta_hat);
  j["r"] = number(rep.r);
  j["min_margin"] = number(rep.min_margin);
  j["passes"] = rep.passes;
  Json pairs = Json::array();
  for (const auto& p : rep.pairs)
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"lhs", number(p.lhs)}, {"rhs", number(p.rhs)}, {"margin", number(p.margin)}});
  j["pairs"] = std::move(pairs);
  return j;
}

Json regime_json(const RegimeReport& rep) {
  Json j;
  j["alpha_cutoff"] = rep.alpha_cutoff;
  j["location_multiplicity"] = to_string(rep.location_multiplicity);
  j["gamma1"] = rep.gamma1;
  j["gamma2"] = rep.gamma2;
  j["sigma_tilde"] = rep.sigma_tilde;
  j["phi1"] = rep.phi1;
  j["phi2"] = rep.phi2;
  j["gamma_ratio"] = rep.gamma_ratio;
  j["labor_uniqueness"] = rep.labor_uniqueness;
  j["reconciliation"] = rep.reconciliation;
  if (rep.eta_hat) {
    j["eta_hat"] = number(*rep.eta_hat);
    j["eta_certified"] = false;
  }
  if (rep.uniqueness) j["uniqueness"] = {{"lhs", number(rep.uniqueness->lhs)}, {"holds", rep.uniqueness->holds}};
  if (rep.existence) j["existence"] = existence_json(*rep.existence);
  if (rep.theorem3) {
    const auto& t = *rep.theorem3;
    j["theorem3"] = {{"hypothesis_value", number(t.hypothesis_value)},
                     {"hypothesis_holds", t.hypothesis_holds},
                     {"d_min", number(t.d_min)},
                     {"note", t.note}};
  }
  return j;
}

Json probe_json(const ProbeReport& rep) {
  Json j;
  j["unique"] = rep.unique;
  Json clusters = Json::array();
  for (const auto& c : rep.clusters) clusters.push_back(doubles(c));
  j["clusters"] = std::move(clusters);
  Json starts = Json::array();
  for (const auto& s : rep.starts)
    starts.push_back({{"index", s.index},
                      {"status", to_string(s.status)},
                      {"cluster", s.cluster},
                      {"residual", number(s.residual)},
                      {"differences", doubles(s.differences)}});
  j["starts"] = std::move(starts);
  return j;
}

Json sustainability_json(const SustainabilityReport& rep) {
  Json j;
  j["verdict"] = to_string(rep.verdict);
  Json vac = Json::array();
  for (const auto& v : rep.vacant) {
    Json e;
    e["site"] = v.site;
    e["host"] = v.host;
    e["regime"] = to_string(v.weight.regime);
    if (v.weight.finite()) {
      e["potential_weight"] = number(v.weight.value);
    } else {
      e["potential_weight"] = v.weight.regime == SpilloverRegime::strong_spillover ? "-inf" : "+inf";
    }
    e["lhs"] = number(v.lhs);
    e["verdict"] = to_string(v.verdict);
    vac.push_back(std::move(e));
  }
  j["vacant"] = std::move(vac);
  return j;
}

Json catalog_json(const EquilibriumCatalog& cat) {
  Json j;
  j["format"] = "urbaneq-catalog";
  j["strategy"] = cat.strategy;
  j["seed"] = cat.seed;
  j["sustainable_count"] = cat.sustainable_entries().size();
  Json entries = Json::array();
  for (const auto& e : cat.entries) {
    Json x;
    x["subset"] = ints(e.subset);
    x["solved"] = e.solved;
    x["failure"] = e.failure;
    x["sustainable"] = e.sustainable;
    x["duplicate_of"] = e.duplicate_of;
    x["margins_pass"] = e.margins_pass;
    x["min_margin"] = number(e.min_margin);
    if (e.solved) {
      x["V"] = number(e.solution.V);
      x["lambda"] = doubles(e.solution.lambda);
      x["L"] = doubles(e.solution.L);
      x["residual"] = number(e.solution.residuals.lambda_eq);
      x["sustainability"] = sustainability_json(e.sustainability);
    }
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  return j;
}

Json validation_json(const ValidationReport& rep) {
  Json j = Json::array();
  for (const auto& c : rep.checks) j.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j;
}

std::string site_csv(const EquilibriumSolution& sol, const Geography& geo) {
  std::ostringstream os;
  os << "id,index,x,y,productivity,active,lambda,L,w,P,B,V_i,area\n";
  auto cell = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? fmt(v[k]) : std::string(); };
  for (std::size_t k = 0; k < sol.site_ids.size(); ++k) {
    const Site& s = geo.sites[static_cast<std::size_t>(sol.site_ids[k])];
    const bool active = k < sol.tessellation.cell_measure.size() && sol.tessellation.active(k);
    os << s.id << ',' << sol.site_ids[k] << ',' << fmt(s.position.x) << ',' << fmt(s.position.y) << ','
       << fmt(s.productivity) << ',' << (active ? 1 : 0) << ',' << cell(sol.lambda, k) << ',' << cell(sol.L, k) << ','
       << cell(sol.w, k) << ',' << cell(sol.P, k) << ',' << cell(sol.B, k) << ',' << cell(sol.V_i, k) << ','
       << cell(sol.tessellation.cell_measure, k) << '\n';
  }
  return os.str();
}

std::string catalog_csv(const EquilibriumCatalog& cat) {
  std::ostringstream os;
  os << "subset,solved,sustainable,duplicate_of,min_margin,V,L\n";
  for (const auto& e : cat.entries) {
    os << join(e.subset, ' ') << ',' << (e.solved ? 1 : 0) << ',' << (e.sustainable ? 1 : 0) << ',' << e.duplicate_of
       << ',' << fmt(e.min_margin) << ',';
    if (e.solved) {
      os << fmt(e.solution.V) << ',';
      for (std::size_t i = 0; i < e.solution.L.size(); ++i) os << (i ? " " : "") << fmt(e.solution.L[i]);
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream os;
  os << "alpha,beta,sigma,valid,multiplicity,labor_unique,reconciliation,gamma_ratio,category\n";
  for (const auto& c : sweep.cells) {
    const bool recon = c.valid && c.multiplicity == Multiplicity::multiple && c.labor_unique;
    os << fmt(c.alpha) << ',' << fmt(c.beta) << ',' << fmt(c.sigma) << ',' << (c.valid ? 1 : 0) << ','
       << to_string(c.multiplicity) << ',' << (c.labor_unique ? 1 : 0) << ',' << (recon ? 1 : 0) << ','
       << (c.valid ? fmt(c.gamma_ratio) : std::string()) << ',' << (c.valid ? c.category : -1) << '\n';
  }
  return os.str();
}

void write_label_pgm(const std::string& path, const DomainGrid& grid, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  out << "P5\n" << grid.nx() << ' ' << grid.ny() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(grid.nx()));
  for (int iy = grid.ny() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const int l = labels[grid.index(ix, iy)];
      row[static_cast<std::size_t>(ix)] = l < 0 ? 255 : static_cast<unsigned char>(std::min(l, 254));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

MapView map_view(const EquilibriumSolution& sol, const Geography& geo) {
  MapView v;
  v.bbox = geo.grid->bbox();
  v.nx = geo.grid->nx();
  v.ny = geo.grid->ny();
  v.labels = sol.tessellation.labels;
  for (std::size_t k = 0; k < sol.site_ids.size(); ++k) {
    MapSite s;
    s.position = geo.sites[static_cast<std::size_t>(sol.site_ids[k])].position;
    s.mass = k < sol.L.size() ? sol.L[k] : 0.0;
    s.active = k < sol.tessellation.cell_measure.size() && sol.tessellation.active(k);
    v.sites.push_back(s);
  }
  for (std::size_t p = 0; p < geo.size(); ++p)
    if (std::find(sol.site_ids.begin(), sol.site_ids.end(), static_cast<int>(p)) == sol.site_ids.end())
      v.sites.push_back({geo.sites[p].position, 0.0, false});
  return v;
}

MapView map_view(const Json& doc) {
  try {
    if (doc.value("format", "") != "urbaneq-solution")
      throw Error(ErrorKind::InvalidArgument, "not a solution document");
    if (!doc.contains("tessellation")) throw Error(ErrorKind::InvalidArgument, "solution has no tessellation");
    MapView v;
    const Json& t = doc.at("tessellation");
    const auto bb = t.at("bbox").get<std::vector<double>>();
    if (bb.size() != 4) throw Error(ErrorKind::InvalidArgument, "bbox needs four numbers");
    v.bbox = {bb[0], bb[1], bb[2], bb[3]};
    v.nx = t.at("nx").get<int>();
    v.ny = t.at("ny").get<int>();
    for (const auto& r : t.at("runs")) v.labels.insert(v.labels.end(), r.at(1).get<std::size_t>(), r.at(0).get<int>());
    if (v.nx < 1 || v.ny < 1 || v.labels.size() != static_cast<std::size_t>(v.nx) * static_cast<std::size_t>(v.ny))
      throw Error(ErrorKind::InvalidArgument, "tessellation runs do not cover the grid");
    for (const auto& s : doc.at("sites")) {
      MapSite m;
      m.position = {s.at("x").get<double>(), s.at("y").get<double>()};
      m.mass = s.at("L").is_number() ? s.at("L").get<double>() : 0.0;
      m.active = s.at("active").get<bool>();
      v.sites.push_back(m);
    }
    if (doc.contains("vacant"))
      for (const auto& s : doc.at("vacant"))
        v.sites.push_back({{s.at("x").get<double>(), s.at("y").get<double>()}, 0.0, false});
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed solution document: ") + e.what());
  }
}

std::string tessellation_svg(const MapView& view, int pixel_width) {
  const Frame f = frame(view.bbox, pixel_width);
  const double cw = (view.bbox.xmax - view.bbox.xmin) / view.nx;
  const double ch = (view.bbox.ymax - view.bbox.ymin) / view.ny;
  auto label = [&](int ix, int iy) { return view.labels[static_cast<std::size_t>(iy) * view.nx + ix]; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
     << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\">\n";
  os << "<rect width=\"" << f.width << "\" height=\"" << f.height << "\" fill=\"#ffffff\"/>\n<g shape-rendering=\"crispEdges\">\n";
  for (int iy = 0; iy < view.ny; ++iy) {
    int ix = 0;
    while (ix < view.nx) {
      const int l = label(ix, iy);
      int end = ix;
      while (end < view.nx && label(end, iy) == l) ++end;
      if (l >= 0) {
        const double x0 = f.px(view.bbox.xmin + ix * cw), x1 = f.px(view.bbox.xmin + end * cw);
        const double y0 = f.py(view.bbox.ymin + (iy + 1) * ch), y1 = f.py(view.bbox.ymin + iy * ch);
        os << "<rect x=\"" << fmt_short(x0) << "\" y=\"" << fmt_short(y0) << "\" width=\"" << fmt_short(x1 - x0)
           << "\" height=\"" << fmt_short(y1 - y0) << "\" fill=\"" << kSitePalette[l % 12] << "\"/>\n";
      }
      ix = end;
    }
  }
  os << "</g>\n<path fill=\"none\" stroke=\"#222222\" stroke-width=\"1\" d=\"";
  for (int iy = 0; iy < view.ny; ++iy)
    for (int ix = 0; ix < view.nx; ++ix) {
      const int l = label(ix, iy);
      const double x = view.bbox.xmin + (ix + 1) * cw, y0 = view.bbox.ymin + iy * ch;
      if (ix + 1 < view.nx && label(ix + 1, iy) != l)
        os << 'M' << fmt_short(f.px(x)) << ' ' << fmt_short(f.py(y0)) << 'V' << fmt_short(f.py(y0 + ch));
      if (iy + 1 < view.ny && label(ix, iy + 1) != l) {
        const double x0 = view.bbox.xmin + ix * cw, y = view.bbox.ymin + (iy + 1) * ch;
        os << 'M' << fmt_short(f.px(x0)) << ' ' << fmt_short(f.py(y)) << 'H' << fmt_short(f.px(x0 + cw));
      }
    }
  os << "\"/>\n";
  double max_mass = 0.0;
  for (const auto& s : view.sites) max_mass = std::max(max_mass, s.mass);
  for (const auto& s : view.sites) {
    const double side = 4.0 + (max_mass > 0.0 ? 16.0 * std::sqrt(s.mass / max_mass) : 0.0);
    os << "<rect x=\"" << fmt_short(f.px(s.position.x) - side / 2) << "\" y=\"" << fmt_short(f.py(s.position.y) - side / 2)
       << "\" width=\"" << fmt_short(side) << "\" height=\"" << fmt_short(side) << "\" fill=\""
       << (s.active ? "#000000" : "#ffffff") << "\" stroke=\"#000000\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string sweep_svg(const SweepResult& sweep, int pixel_width) {
  const SweepSpec& sp = sweep.spec;
  const bool ab = sp.panel == SweepPanel::alpha_beta;
  const int na = sp.n_alpha, nb = ab ? sp.n_beta : sp.n_sigma;
  const double ymin = ab ? sp.beta_min : sp.sigma_min, ymax = ab ? sp.beta_max : sp.sigma_max;
  const double da = (sp.alpha_max - sp.alpha_min) / (na - 1), dy = (ymax - ymin) / (nb - 1);
  // Cells are centered on sweep points.
  const BBox box{sp.alpha_min - da / 2, ymin - dy / 2, sp.alpha_max + da / 2, ymax + dy / 2};
  const int margin = 60, legend = 200;
  Frame f = frame(box, pixel_width);
  f.scale = pixel_width / (box.xmax - box.xmin);
  const double yscale = static_cast<double>(pixel_width) / (box.ymax - box.ymin);
  auto px = [&](double a) { return margin + (a - box.xmin) * f.scale; };
  auto py = [&](double b) { return margin + (box.ymax - b) * yscale; };
  const int W = pixel_width + 2 * margin + legend, H = pixel_width + 2 * margin;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"#ffffff\"/>\n<g shape-rendering=\"crispEdges\">\n";
  for (int r = 0; r < nb; ++r)
    for (int a = 0; a < na; ++a) {
      const SweepCell& c = sweep.cells[static_cast<std::size_t>(r) * na + a];
      const double x0 = px(c.alpha - da / 2), x1 = px(c.alpha + da / 2);
      const double yv = ab ? c.beta : c.sigma;
      const double y0 = py(yv + dy / 2), y1 = py(yv - dy / 2);
      os << "<rect x=\"" << fmt_short(x0) << "\" y=\"" << fmt_short(y0) << "\" width=\"" << fmt_short(x1 - x0)
         << "\" height=\"" << fmt_short(y1 - y0) << "\" fill=\"" << (c.valid ? kCategoryPalette[c.category] : "#ffffff")
         << "\"/>\n";
    }
  os << "</g>\n";
  auto polyline = [&](const std::vector<Point>& pts, const char* color) {
    if (pts.size() < 2) return;
    os << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
      os << (i ? 'L' : 'M') << fmt_short(px(pts[i].x)) << ' ' << fmt_short(py(pts[i].y));
    os << "\"/>\n";
  };
  if (ab) {
    // Labor boundary branches alpha = -beta and alpha = beta - 2.
    std::vector<Point> b1, b2;
    for (const auto& p : sweep.labor_boundary) (std::abs(p.x + p.y) < 1e-12 ? b1 : b2).push_back(p);
    polyline(b1, "#000000");
    polyline(b2, "#000000");
    const double cut = 1.0 / (sp.sigma - 1.0);
    if (cut >= sp.alpha_min && cut <= sp.alpha_max) polyline({{cut, ymin}, {cut, ymax}}, "#b2182b");
  } else {
    polyline(sweep.boundary, "#b2182b");
  }
  os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << pixel_width << "\" height=\"" << pixel_width
     << "\" fill=\"none\" stroke=\"#000000\"/>\n";
  os << "<text x=\"" << margin + pixel_width / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">alpha ["
     << fmt_short(sp.alpha_min) << ", " << fmt_short(sp.alpha_max) << "]</text>\n";
  os << "<text x=\"20\" y=\"" << margin + pixel_width / 2 << "\" transform=\"rotate(-90 20 " << margin + pixel_width / 2
     << ")\" text-anchor=\"middle\">" << (ab ? "beta" : "sigma") << " [" << fmt_short(ymin) << ", " << fmt_short(ymax)
     << "]</text>\n";
  for (int c = 0; c < 6; ++c) {
    const int y = margin + 24 * c;
    os << "<rect x=\"" << W - legend + 10 << "\" y=\"" << y << "\" width=\"16\" height=\"16\" fill=\""
       << kCategoryPalette[c] << "\" stroke=\"#000000\"/>\n";
    os << "<text x=\"" << W - legend + 32 << "\" y=\"" << y + 13 << "\">" << kCategoryNames[c] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace urbaneq::io
