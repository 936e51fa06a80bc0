#include "urbaneq/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "clip.hpp"
#include "urbaneq/error.hpp"
#include "urbaneq/kernels.hpp"

namespace urbaneq {

DomainGrid::DomainGrid(BBox bbox, int nx, int ny) : bbox_(bbox), nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) throw Error(ErrorKind::InvalidArgument, "grid resolution must be at least 2 per axis");
  if (!(bbox.xmax > bbox.xmin) || !(bbox.ymax > bbox.ymin))
    throw Error(ErrorKind::InvalidArgument, "bounding box must have positive extent");
  dx_ = (bbox.xmax - bbox.xmin) / nx;
  dy_ = (bbox.ymax - bbox.ymin) / ny;
  mask_.assign(static_cast<std::size_t>(nx) * ny, 0);
}

double DomainGrid::half_diagonal() const { return 0.5 * std::hypot(dx_, dy_); }

Point DomainGrid::center(std::size_t cell) const {
  const std::size_t ix = cell % nx_;
  const std::size_t iy = cell / nx_;
  return {bbox_.xmin + (ix + 0.5) * dx_, bbox_.ymin + (iy + 0.5) * dy_};
}

long DomainGrid::cell_of(Point p) const {
  if (p.x < bbox_.xmin || p.x > bbox_.xmax || p.y < bbox_.ymin || p.y > bbox_.ymax) return -1;
  int ix = static_cast<int>(std::floor((p.x - bbox_.xmin) / dx_));
  int iy = static_cast<int>(std::floor((p.y - bbox_.ymin) / dy_));
  ix = std::clamp(ix, 0, nx_ - 1);
  iy = std::clamp(iy, 0, ny_ - 1);
  return static_cast<long>(index(ix, iy));
}

const BoundaryClip* DomainGrid::clip(std::size_t cell) const {
  if (clip_index_.empty()) return nullptr;
  const int k = clip_index_[cell];
  return k < 0 ? nullptr : &clips_[k];
}

double DomainGrid::inside_area() const {
  double s = 0.0;
  for (std::size_t c = 0; c < size(); ++c) s += coverage(c);
  return s * cell_area();
}

void DomainGrid::finalize() {
  inside_count_ = static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
  if (inside_count_ == 0) throw Error(ErrorKind::EmptyDomain, "no cell lies inside the domain");
  std::vector<std::uint8_t> seen(mask_.size(), 0);
  const auto first = static_cast<std::size_t>(std::find(mask_.begin(), mask_.end(), 1) - mask_.begin());
  std::deque<std::size_t> queue{first};
  seen[first] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const std::size_t c = queue.front();
    queue.pop_front();
    ++reached;
    const int ix = static_cast<int>(c % nx_), iy = static_cast<int>(c / nx_);
    const int nbx[4] = {ix - 1, ix + 1, ix, ix};
    const int nby[4] = {iy, iy, iy - 1, iy + 1};
    for (int q = 0; q < 4; ++q) {
      if (nbx[q] < 0 || nbx[q] >= nx_ || nby[q] < 0 || nby[q] >= ny_) continue;
      const std::size_t nb = index(nbx[q], nby[q]);
      if (mask_[nb] && !seen[nb]) {
        seen[nb] = 1;
        queue.push_back(nb);
      }
    }
  }
  if (reached != inside_count_)
    throw Error(ErrorKind::DisconnectedDomain,
                std::to_string(inside_count_ - reached) + " inside cells are not 4-connected to cell " +
                    std::to_string(first));
}

DomainGrid DomainGrid::build(BBox bbox, int nx, int ny, const Predicate& inside) {
  DomainGrid g(bbox, nx, ny);
  for (std::size_t c = 0; c < g.size(); ++c) g.mask_[c] = inside(g.center(c)) ? 1 : 0;
  g.finalize();
  return g;
}

DomainGrid DomainGrid::from_mask(BBox bbox, int nx, int ny, std::vector<std::uint8_t> mask) {
  DomainGrid g(bbox, nx, ny);
  if (mask.size() != g.size()) throw Error(ErrorKind::InvalidArgument, "mask size does not match resolution");
  for (auto& m : mask) m = m ? 1 : 0;
  g.mask_ = std::move(mask);
  g.finalize();
  return g;
}

DomainGrid DomainGrid::build_levelset(BBox bbox, int nx, int ny, const LevelSet& phi) {
  DomainGrid g(bbox, nx, ny);
  g.coverage_.assign(g.size(), 0.0);
  g.clip_index_.assign(g.size(), -1);
  const double hd = g.half_diagonal();
  const double step = 1e-6 * std::min(g.dx_, g.dy_);
  detail::ConvexPolygon poly;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const Point p = g.center(c);
    const double f = phi(p);
    const double gx = (phi({p.x + step, p.y}) - phi({p.x - step, p.y})) / (2.0 * step);
    const double gy = (phi({p.x, p.y + step}) - phi({p.x, p.y - step})) / (2.0 * step);
    const double reach = std::hypot(gx, gy) * hd;
    double cov;
    if (f <= -reach) {
      cov = 1.0;
    } else if (f >= reach) {
      cov = 0.0;
    } else {
      poly.reset_rect(p.x - 0.5 * g.dx_, p.y - 0.5 * g.dy_, p.x + 0.5 * g.dx_, p.y + 0.5 * g.dy_);
      poly.clip(f, gx, gy, p.x, p.y, detail::kTagDomain, 0.0);
      cov = poly.empty() ? 0.0 : poly.area() / g.cell_area();
      if (cov >= 1.0 - 1e-12) {
        cov = 1.0;
      } else if (cov > 1e-12) {
        g.clip_index_[c] = static_cast<int>(g.clips_.size());
        g.clips_.push_back({f, gx, gy});
      } else {
        cov = 0.0;
      }
    }
    g.coverage_[c] = cov;
    g.mask_[c] = cov > 0.0 ? 1 : 0;
  }
  g.finalize();
  return g;
}

double DistanceSystem::scale(std::size_t i) const {
  if (kind == MetricKind::euclidean) return 1.0;
  return i < scales.size() ? scales[i] : 1.0;
}

double DistanceSystem::distance(std::size_t i, Point site, Point x) const {
  return scale(i) * std::hypot(x.x - site.x, x.y - site.y);
}

Point DistanceSystem::gradient(std::size_t i, Point site, Point x) const {
  const double r = std::hypot(x.x - site.x, x.y - site.y);
  if (r == 0.0) return {0.0, 0.0};
  const double s = scale(i);
  return {s * (x.x - site.x) / r, s * (x.y - site.y) / r};
}

DistanceSystem DistanceSystem::subset(std::span<const int> indices) const {
  DistanceSystem out;
  out.kind = kind;
  if (kind == MetricKind::scaled_euclidean)
    for (int i : indices) out.scales.push_back(scale(static_cast<std::size_t>(i)));
  return out;
}

double site_distance(const DistanceSystem& metric, const std::vector<Site>& sites, std::size_t i, Point x) {
  return metric.distance(i, sites[i].position, x);
}

bool Tessellation::adjacent(int i, int k) const {
  const auto& nb = neighbors[static_cast<std::size_t>(i)];
  return std::binary_search(nb.begin(), nb.end(), k);
}

void check_distinct_sites(const std::vector<Site>& sites) {
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j)
      if (sites[i].position.x == sites[j].position.x && sites[i].position.y == sites[j].position.y)
        throw Error(ErrorKind::CoincidentSites,
                    "sites " + std::to_string(i) + " and " + std::to_string(j) + " share a position");
}

namespace {

void finalize_tessellation(const DomainGrid& grid, Tessellation& t) {
  const std::size_t n = t.weights.size();
  t.cell_measure.assign(n, 0.0);
  const double area = grid.cell_area();
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const int l = t.labels[c];
    if (l == kVacuum || t.mixed[c]) continue;
    t.cell_measure[static_cast<std::size_t>(l)] += area;
  }
  for (const auto& p : t.pieces) t.cell_measure[static_cast<std::size_t>(p.site)] += p.area;

  t.neighbors.assign(n, {});
  auto link = [&](int a, int b) {
    if (a == b || a == kVacuum || b == kVacuum) return;
    t.neighbors[static_cast<std::size_t>(a)].push_back(b);
    t.neighbors[static_cast<std::size_t>(b)].push_back(a);
  };
  for (const auto& s : t.interfaces)
    if (s.length > 0.0) link(s.site, s.other);
  for (int iy = 0; iy < grid.ny(); ++iy)
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const int l = t.labels[grid.index(ix, iy)];
      if (ix + 1 < grid.nx()) link(l, t.labels[grid.index(ix + 1, iy)]);
      if (iy + 1 < grid.ny()) link(l, t.labels[grid.index(ix, iy + 1)]);
    }
  for (auto& nb : t.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  t.active_set.clear();
  for (std::size_t i = 0; i < n; ++i)
    if (t.cell_measure[i] > 0.0) t.active_set.push_back(static_cast<int>(i));
}

}  // namespace

Tessellation assign_labels(const DomainGrid& grid, const std::vector<Site>& sites, const DistanceSystem& metric,
                           std::span<const double> lambda) {
  if (sites.empty()) throw Error(ErrorKind::InvalidArgument, "no sites");
  if (lambda.size() != sites.size()) throw Error(ErrorKind::InvalidArgument, "weight vector size mismatch");
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (!std::isfinite(lambda[i])) throw Error(ErrorKind::NonFiniteWeight, "weight " + std::to_string(i));
  check_distinct_sites(sites);
  Tessellation t = kernels::partition_omp(grid, kernels::SiteFrame::make(sites, metric), lambda);
  finalize_tessellation(grid, t);
  return t;
}

FeasibilityReport lambda_feasibility(const std::vector<Site>& sites, const DistanceSystem& metric,
                                     std::span<const double> lambda, double k) {
  if (!(k > 0.0 && k < 1.0)) throw Error(ErrorKind::InvalidArgument, "k must lie in (0, 1)");
  FeasibilityReport rep;
  rep.n = sites.size();
  rep.pairs.assign(rep.n * rep.n, Feasibility::interior);
  for (std::size_t i = 0; i < rep.n; ++i)
    for (std::size_t j = 0; j < rep.n; ++j) {
      if (i == j) continue;
      const double d = site_distance(metric, sites, i, sites[j].position);
      const double diff = lambda[i] - lambda[j];
      Feasibility f = Feasibility::interior;
      if (diff >= d) {
        f = Feasibility::infeasible;
      } else if (diff >= k * d) {
        f = Feasibility::boundary;
      }
      rep.pairs[i * rep.n + j] = f;
      if (static_cast<int>(f) > static_cast<int>(rep.verdict)) rep.verdict = f;
    }
  return rep;
}

PairwiseMetrics pairwise_metrics(const std::vector<Site>& sites, const DistanceSystem& metric, bool require_d_min) {
  PairwiseMetrics m;
  m.n = sites.size();
  if (m.n == 0) throw Error(ErrorKind::InvalidArgument, "no sites");
  if (m.n == 1 && require_d_min) throw Error(ErrorKind::SingleSite, "d_min needs at least two sites");
  m.d.assign(m.n * m.n, 0.0);
  m.d_min = std::numeric_limits<double>::infinity();
  m.r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.n; ++i) {
    double far = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) {
      if (i == j) continue;
      const double d = site_distance(metric, sites, i, sites[j].position);
      m.d[i * m.n + j] = d;
      m.d_min = std::min(m.d_min, d);
      far = std::max(far, d);
    }
    m.r = std::min(m.r, far);
  }
  if (m.n == 1) m.d_min = 0.0;
  return m;
}

}  // namespace urbaneq
