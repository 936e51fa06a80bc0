#include "urbaneq/fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "urbaneq/error.hpp"

namespace urbaneq {

namespace {
constexpr const char* kRasterMagic = "URBANEQ-RASTER 1";
}

Raster read_raster(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open raster " + path);
  std::string magic;
  std::getline(in, magic);
  if (magic != kRasterMagic) throw Error(ErrorKind::Io, path + ": not a raster file (bad header)");
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  Raster r;
  if (!(hs >> r.nx >> r.ny >> r.bbox.xmin >> r.bbox.ymin >> r.bbox.xmax >> r.bbox.ymax))
    throw Error(ErrorKind::Io, path + ": malformed raster header");
  if (r.nx < 1 || r.ny < 1) throw Error(ErrorKind::Io, path + ": raster dimensions must be positive");
  r.values.resize(static_cast<std::size_t>(r.nx) * r.ny);
  in.read(reinterpret_cast<char*>(r.values.data()), static_cast<std::streamsize>(r.values.size() * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(r.values.size() * sizeof(double)))
    throw Error(ErrorKind::Io, path + ": raster payload truncated");
  return r;
}

void write_raster(const std::string& path, const Raster& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write raster " + path);
  out << kRasterMagic << '\n'
      << r.nx << ' ' << r.ny << ' ' << std::setprecision(17) << r.bbox.xmin << ' ' << r.bbox.ymin << ' '
      << r.bbox.xmax << ' ' << r.bbox.ymax << '\n';
  out.write(reinterpret_cast<const char*>(r.values.data()), static_cast<std::streamsize>(r.values.size() * sizeof(double)));
}

AmenityField::AmenityField(const DomainGrid& grid, std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.size() != grid.size()) throw Error(ErrorKind::InvalidArgument, "amenity sample count mismatch");
  log_samples_.resize(samples_.size(), 0.0);
  b_min_ = std::numeric_limits<double>::infinity();
  b_max_ = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < samples_.size(); ++c) {
    if (!grid.inside(c)) continue;
    const double v = samples_[c];
    if (!std::isfinite(v) || v <= 0.0)
      throw Error(ErrorKind::NonPositiveAmenity, "cell " + std::to_string(c) + " has amenity " + std::to_string(v));
    log_samples_[c] = std::log(v);
    if (v < b_min_) {
      b_min_ = v;
      argmin_ = c;
    }
    if (v > b_max_) {
      b_max_ = v;
      argmax_ = c;
    }
  }
}

AmenityField amenity_from_function(const DomainGrid& grid, const std::function<double(Point)>& f) {
  std::vector<double> s(grid.size(), 0.0);
  for (std::size_t c = 0; c < grid.size(); ++c)
    if (grid.inside(c)) s[c] = f(grid.center(c));
  return AmenityField(grid, std::move(s));
}

AmenityField amenity_from_raster(const DomainGrid& grid, const Raster& raster) {
  if (raster.nx != grid.nx() || raster.ny != grid.ny())
    throw Error(ErrorKind::InvalidArgument, "amenity raster is " + std::to_string(raster.nx) + "x" +
                                                std::to_string(raster.ny) + ", grid is " + std::to_string(grid.nx()) +
                                                "x" + std::to_string(grid.ny()));
  const BBox& a = raster.bbox;
  const BBox& b = grid.bbox();
  const double tol = 1e-9 * std::max(b.xmax - b.xmin, b.ymax - b.ymin);
  if (std::abs(a.xmin - b.xmin) > tol || std::abs(a.ymin - b.ymin) > tol || std::abs(a.xmax - b.xmax) > tol ||
      std::abs(a.ymax - b.ymax) > tol)
    throw Error(ErrorKind::InvalidArgument, "amenity raster bbox differs from grid bbox");
  std::vector<double> s = raster.values;
  for (std::size_t c = 0; c < s.size(); ++c)
    if (!grid.inside(c)) s[c] = 0.0;
  return AmenityField(grid, std::move(s));
}

TradeCostMatrix TradeCostMatrix::subset(std::span<const int> indices) const {
  TradeCostMatrix out;
  out.n = indices.size();
  out.origin = origin;
  out.tau = tau;
  out.values.resize(out.n * out.n);
  for (std::size_t a = 0; a < out.n; ++a)
    for (std::size_t b = 0; b < out.n; ++b)
      out.values[a * out.n + b] = (*this)(static_cast<std::size_t>(indices[a]), static_cast<std::size_t>(indices[b]));
  return out;
}

TradeCostMatrix trade_costs_from_metric(const std::vector<Site>& sites, const DistanceSystem& metric, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidArgument, "tau must be finite and >= 0");
  TradeCostMatrix t;
  t.n = sites.size();
  t.origin = TradeOrigin::from_metric;
  t.tau = tau;
  t.values.assign(t.n * t.n, 1.0);
  for (std::size_t i = 0; i < t.n; ++i)
    for (std::size_t j = 0; j < t.n; ++j) {
      if (i == j) continue;
      const double dji = site_distance(metric, sites, j, sites[i].position);
      const double dij = site_distance(metric, sites, i, sites[j].position);
      if (std::abs(dji - dij) > 1e-12 * std::max(dji, dij))
        throw Error(ErrorKind::AsymmetricMetric, "d between sites " + std::to_string(i) + " and " +
                                                     std::to_string(j) + " is not symmetric");
      t.values[i * t.n + j] = std::exp(tau * dji);
    }
  return t;
}

TradeCostMatrix trade_costs_explicit(std::size_t n, std::vector<double> values) {
  if (values.size() != n * n) throw Error(ErrorKind::InvalidArgument, "trade matrix is not square");
  for (double v : values)
    if (!std::isfinite(v) || v <= 0.0) throw Error(ErrorKind::InvalidArgument, "trade costs must be positive");
  TradeCostMatrix t;
  t.n = n;
  t.values = std::move(values);
  t.origin = TradeOrigin::explicit_matrix;
  return t;
}

TradeCostMatrix read_trade_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open trade matrix " + path);
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string field;
    std::size_t count = 0;
    while (std::getline(ls, field, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
        if (field.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": not a number: '" + field + "'");
      }
      ++count;
    }
    if (rows == 0) cols = count;
    if (count != cols) throw Error(ErrorKind::Io, path + ":" + std::to_string(lineno) + ": ragged row");
    ++rows;
  }
  if (rows != cols || rows == 0) throw Error(ErrorKind::Io, path + ": trade matrix must be square");
  return trade_costs_explicit(rows, std::move(values));
}

double CommutingCost::factor(double distance) const { return std::exp(delta * distance); }

Geography Geography::create(std::shared_ptr<const DomainGrid> grid, std::shared_ptr<const AmenityField> amenity,
                            std::vector<Site> sites, DistanceSystem metric, TradeCostMatrix trade) {
  if (!grid || !amenity) throw Error(ErrorKind::InvalidArgument, "geography needs a grid and an amenity field");
  if (sites.empty()) throw Error(ErrorKind::InvalidArgument, "geography needs at least one site");
  check_distinct_sites(sites);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const Site& s = sites[i];
    const long cell = grid->cell_of(s.position);
    if (cell < 0 || !grid->inside(static_cast<std::size_t>(cell)))
      throw Error(ErrorKind::InvalidArgument, "site " + std::to_string(i) + " does not lie on an inside cell");
    if (!std::isfinite(s.productivity) || s.productivity <= 0.0)
      throw Error(ErrorKind::InvalidArgument, "site " + std::to_string(i) + " productivity must be positive");
  }
  if (metric.kind == MetricKind::scaled_euclidean) {
    if (metric.scales.size() != sites.size())
      throw Error(ErrorKind::InvalidArgument, "scaled metric needs one scale per site");
    for (double s : metric.scales)
      if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::InvalidArgument, "metric scales must be positive");
  }
  if (trade.n != sites.size()) throw Error(ErrorKind::InvalidArgument, "trade matrix size differs from site count");
  Geography g;
  g.grid = std::move(grid);
  g.amenity = std::move(amenity);
  g.sites = std::move(sites);
  g.metric = std::move(metric);
  g.trade = std::move(trade);
  return g;
}

Geography Geography::subset(std::span<const int> indices) const {
  Geography g;
  g.grid = grid;
  g.amenity = amenity;
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= sites.size())
      throw Error(ErrorKind::InvalidArgument, "site index " + std::to_string(i) + " out of range");
    g.sites.push_back(sites[static_cast<std::size_t>(i)]);
  }
  g.metric = metric.subset(indices);
  g.trade = trade.subset(indices);
  return g;
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ValidationReport validate_geography(const Geography& geo, std::uint64_t seed, std::size_t triangle_samples) {
  ValidationReport rep;
  const std::size_t n = geo.size();
  auto fmt = [](double v) {
    std::ostringstream s;
    s << std::setprecision(10) << v;
    return s.str();
  };

  const auto& am = *geo.amenity;
  rep.checks.push_back({"amenity_bounds", am.b_min() > 0.0 && std::isfinite(am.b_max()),
                        "b_min=" + fmt(am.b_min()) + " at cell " + std::to_string(am.argmin()) + ", b_max=" +
                            fmt(am.b_max()) + " at cell " + std::to_string(am.argmax())});

  double a_min = std::numeric_limits<double>::infinity(), a_max = 0.0;
  for (const auto& s : geo.sites) {
    a_min = std::min(a_min, s.productivity);
    a_max = std::max(a_max, s.productivity);
  }
  rep.checks.push_back({"productivity_bounds", a_min > 0.0 && std::isfinite(a_max),
                        "A_min=" + fmt(a_min) + ", A_max=" + fmt(a_max)});

  AssumptionCheck sym{"trade_symmetric", true, "symmetric"};
  AssumptionCheck diag{"trade_diagonal", true, "T_ii = 1"};
  AssumptionCheck bound{"trade_bounds", true, ""};
  double t_max = 1.0;
  for (std::size_t i = 0; i < n && sym.passed; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = geo.trade(i, j), b = geo.trade(j, i);
      if (std::abs(a - b) > 1e-12 * std::max(a, b)) {
        sym.passed = false;
        sym.detail = "T(" + std::to_string(i) + "," + std::to_string(j) + ")=" + fmt(a) + " != T(" + std::to_string(j) +
                     "," + std::to_string(i) + ")=" + fmt(b);
        break;
      }
    }
  for (std::size_t i = 0; i < n; ++i) {
    if (geo.trade(i, i) != 1.0 && diag.passed) {
      diag.passed = false;
      diag.detail = "T(" + std::to_string(i) + "," + std::to_string(i) + ")=" + fmt(geo.trade(i, i));
    }
    for (std::size_t j = 0; j < n; ++j) {
      t_max = std::max(t_max, geo.trade(i, j));
      if (geo.trade(i, j) < 1.0 && bound.passed) {
        bound.passed = false;
        bound.detail = "T(" + std::to_string(i) + "," + std::to_string(j) + ")=" + fmt(geo.trade(i, j)) + " < 1; ";
      }
    }
  }
  bound.detail += "T_max=" + fmt(t_max);
  rep.checks.push_back(sym);
  rep.checks.push_back(diag);
  rep.checks.push_back(bound);

  AssumptionCheck tri{"triangle_inequality", true, ""};
  if (n >= 2) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> inside;
    for (std::size_t c = 0; c < geo.grid->size(); ++c)
      if (geo.grid->inside(c)) inside.push_back(c);
    std::uniform_int_distribution<std::size_t> pick_cell(0, inside.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_site(0, n - 1);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    std::size_t checked = 0;
    for (std::size_t s = 0; s < triangle_samples; ++s) {
      const std::size_t i = pick_site(rng);
      std::size_t j = pick_site(rng);
      if (j == i) j = (j + 1) % n;
      const Point c = geo.grid->center(inside[pick_cell(rng)]);
      const Point x{c.x + jitter(rng) * geo.grid->dx(), c.y + jitter(rng) * geo.grid->dy()};
      const double lhs = geo.distance(i, x);
      const double rhs = geo.distance(i, geo.sites[j].position) + geo.distance(j, x);
      ++checked;
      if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) {
        tri.passed = false;
        tri.detail = "witness (i=" + std::to_string(i) + ", j=" + std::to_string(j) + ", x=(" + fmt(x.x) + "," +
                     fmt(x.y) + ")): d_i(x)=" + fmt(lhs) + " > d_i(y_j)+d_j(x)=" + fmt(rhs);
        break;
      }
    }
    if (tri.passed) tri.detail = std::to_string(checked) + " sampled triples hold";
  } else {
    tri.detail = "single site";
  }
  rep.checks.push_back(tri);

  double c_lo = std::numeric_limits<double>::infinity(), c_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    c_lo = std::min(c_lo, geo.metric.scale(i));
    c_hi = std::max(c_hi, geo.metric.scale(i));
  }
  rep.checks.push_back({"double_lipschitz", true, "c=" + fmt(c_lo) + ", C=" + fmt(c_hi)});

  if (geo.trade.origin == TradeOrigin::from_metric) {
    AssumptionCheck mult{"trade_multiplicative_triangle", true, "T_jk <= T_ij T_ik for all triples"};
    for (std::size_t i = 0; i < n && mult.passed; ++i)
      for (std::size_t j = 0; j < n && mult.passed; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (geo.trade(j, k) > geo.trade(i, j) * geo.trade(i, k) * (1.0 + 1e-12)) {
            mult.passed = false;
            mult.detail = "witness (" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
            break;
          }
    rep.checks.push_back(mult);
  }
  return rep;
}

}  // namespace urbaneq
