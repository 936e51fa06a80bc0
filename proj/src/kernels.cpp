#include "urbaneq/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <limits>

#include "clip.hpp"
#include "urbaneq/error.hpp"

namespace urbaneq {

KernelSpec KernelSpec::make(double beta_eff, double commuting_rate) {
  if (!(beta_eff < 0.0)) throw Error(ErrorKind::InvalidArgument, "kernel requires beta_eff < 0");
  return {-1.0 / beta_eff, commuting_rate, beta_eff};
}

namespace kernels {

SiteFrame SiteFrame::make(const std::vector<Site>& sites, const DistanceSystem& metric) {
  SiteFrame f;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    f.x.push_back(sites[i].position.x);
    f.y.push_back(sites[i].position.y);
    f.s.push_back(metric.scale(i));
  }
  return f;
}

double SiteFrame::distance(std::size_t i, Point p) const { return s[i] * std::hypot(p.x - x[i], p.y - y[i]); }

namespace {

int center_argmin(const SiteFrame& f, std::span<const double> lambda, Point c, double* w) {
  int best = 0;
  double wbest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double v = f.s[j] * std::hypot(c.x - f.x[j], c.y - f.y[j]) - lambda[j];
    if (w) w[j] = v;
    if (v < wbest) {
      wbest = v;
      best = static_cast<int>(j);
    }
  }
  return best;
}

// Per-thread scratch for one cell.
struct CellScratch {
  std::vector<double> w;
  std::vector<int> cand;
  std::vector<double> gx, gy;
  detail::ConvexPolygon poly;
};

struct RowOut {
  std::vector<CellPiece> pieces;
  std::vector<InterfaceSegment> interfaces;
};

void process_row(const DomainGrid& grid, const SiteFrame& f, std::span<const double> lambda, int iy, int* labels,
                 std::uint8_t* mixed, CellScratch& s, RowOut& out) {
  const std::size_t n = f.size();
  s.w.resize(n);
  s.gx.resize(n);
  s.gy.resize(n);
  const double hd = grid.half_diagonal();
  const double hx = 0.5 * grid.dx(), hy = 0.5 * grid.dy();
  const double min_area = 1e-13 * grid.cell_area();
  for (int ix = 0; ix < grid.nx(); ++ix) {
    const std::size_t cell = grid.index(ix, iy);
    mixed[cell] = 0;
    if (!grid.inside(cell)) {
      labels[cell] = kVacuum;
      continue;
    }
    const Point c = grid.center(cell);
    const int best = center_argmin(f, lambda, c, s.w.data());
    labels[cell] = best;
    s.cand.clear();
    const double wb = s.w[static_cast<std::size_t>(best)];
    const double sb = f.s[static_cast<std::size_t>(best)];
    for (std::size_t j = 0; j < n; ++j)
      if (s.w[j] - wb <= (f.s[j] + sb) * hd * (1.0 + 1e-12)) s.cand.push_back(static_cast<int>(j));
    const BoundaryClip* bc = grid.clip(cell);
    if (s.cand.size() == 1 && bc == nullptr) continue;
    mixed[cell] = 1;
    for (int j : s.cand) {
      const double r = std::hypot(c.x - f.x[j], c.y - f.y[j]);
      s.gx[j] = r > 0.0 ? f.s[j] * (c.x - f.x[j]) / r : 0.0;
      s.gy[j] = r > 0.0 ? f.s[j] * (c.y - f.y[j]) / r : 0.0;
    }
    for (int k : s.cand) {
      s.poly.reset_rect(c.x - hx, c.y - hy, c.x + hx, c.y + hy);
      if (bc) s.poly.clip(bc->phi, bc->gx, bc->gy, c.x, c.y, detail::kTagDomain, 0.0);
      for (int j : s.cand) {
        if (j == k || s.poly.empty()) continue;
        const double c0 = s.w[k] - s.w[j];
        const double a = s.gx[k] - s.gx[j], b = s.gy[k] - s.gy[j];
        const double tol = 1e-12 * (std::abs(c0) + (std::abs(a) + std::abs(b)) * hd + hd);
        s.poly.clip(c0, a, b, c.x, c.y, j, tol);
      }
      if (s.poly.empty()) continue;
      const double area = s.poly.area();
      if (!(area > min_area)) continue;
      out.pieces.push_back({static_cast<std::int32_t>(cell), k, area, s.poly.centroid(c.x, c.y)});
      const auto& v = s.poly.vertices();
      for (std::size_t q = 0; q < v.size(); ++q) {
        const int tag = v[q].tag;
        if (tag < 0) continue;
        const auto& nx = v[(q + 1) % v.size()];
        const double len = std::hypot(nx.x - v[q].x, nx.y - v[q].y);
        if (len <= 0.0) continue;
        InterfaceSegment seg;
        seg.cell = static_cast<std::int32_t>(cell);
        seg.site = k;
        seg.other = tag;
        seg.length = len;
        seg.midpoint = {0.5 * (v[q].x + nx.x), 0.5 * (v[q].y + nx.y)};
        seg.gradient_gap = std::hypot(s.gx[k] - s.gx[tag], s.gy[k] - s.gy[tag]);
        out.interfaces.push_back(seg);
      }
    }
  }
}

Tessellation empty_tessellation(const DomainGrid& grid, std::span<const double> lambda) {
  Tessellation t;
  t.weights.assign(lambda.begin(), lambda.end());
  t.labels.assign(grid.size(), kVacuum);
  t.mixed.assign(grid.size(), 0);
  t.row_pieces.assign(static_cast<std::size_t>(grid.ny()) + 1, 0);
  t.row_interfaces.assign(static_cast<std::size_t>(grid.ny()) + 1, 0);
  return t;
}

void append_row(Tessellation& t, int iy, RowOut& row) {
  t.pieces.insert(t.pieces.end(), row.pieces.begin(), row.pieces.end());
  t.interfaces.insert(t.interfaces.end(), row.interfaces.begin(), row.interfaces.end());
  t.row_pieces[static_cast<std::size_t>(iy) + 1] = t.pieces.size();
  t.row_interfaces[static_cast<std::size_t>(iy) + 1] = t.interfaces.size();
}

}  // namespace

Tessellation partition_serial(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda) {
  Tessellation t = empty_tessellation(grid, lambda);
  CellScratch scratch;
  for (int iy = 0; iy < grid.ny(); ++iy) {
    RowOut row;
    process_row(grid, frame, lambda, iy, t.labels.data(), t.mixed.data(), scratch, row);
    append_row(t, iy, row);
  }
  return t;
}

Tessellation partition_omp(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda) {
  Tessellation t = empty_tessellation(grid, lambda);
  std::vector<RowOut> rows(static_cast<std::size_t>(grid.ny()));
#pragma omp parallel
  {
    CellScratch scratch;
#pragma omp for schedule(static)
    for (int iy = 0; iy < grid.ny(); ++iy)
      process_row(grid, frame, lambda, iy, t.labels.data(), t.mixed.data(), scratch,
                  rows[static_cast<std::size_t>(iy)]);
  }
  for (int iy = 0; iy < grid.ny(); ++iy) append_row(t, iy, rows[static_cast<std::size_t>(iy)]);
  return t;
}

std::vector<int> labels_serial(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda) {
  std::vector<int> labels(grid.size(), kVacuum);
  for (std::size_t c = 0; c < grid.size(); ++c)
    if (grid.inside(c)) labels[c] = center_argmin(frame, lambda, grid.center(c), nullptr);
  return labels;
}

std::vector<int> labels_omp(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda) {
  std::vector<int> labels(grid.size(), kVacuum);
  const auto total = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < total; ++c)
    if (grid.inside(static_cast<std::size_t>(c)))
      labels[static_cast<std::size_t>(c)] = center_argmin(frame, lambda, grid.center(static_cast<std::size_t>(c)), nullptr);
  return labels;
}

namespace {

// All integrand values are scaled by e^{-shift} so they stay at or below one.
double kernel_shift(const AmenityField& amenity, const KernelSpec& kernel) {
  return kernel.amenity_exponent * std::log(amenity.b_max());
}

void accumulate_row(const DomainGrid& grid, const SiteFrame& f, const Tessellation& t, const AmenityField& amenity,
                    const KernelSpec& kernel, double shift, int iy, double* sums) {
  const double area = grid.cell_area();
  for (int ix = 0; ix < grid.nx(); ++ix) {
    const std::size_t cell = grid.index(ix, iy);
    const int l = t.labels[cell];
    if (l == kVacuum || t.mixed[cell]) continue;
    const double d = f.distance(static_cast<std::size_t>(l), grid.center(cell));
    sums[l] += std::exp(kernel.log_value(amenity.log_at(cell), d) - shift);
  }
  for (std::size_t q = t.row_pieces[static_cast<std::size_t>(iy)]; q < t.row_pieces[static_cast<std::size_t>(iy) + 1];
       ++q) {
    const CellPiece& p = t.pieces[q];
    const double d = f.distance(static_cast<std::size_t>(p.site), p.centroid);
    sums[p.site] += (p.area / area) * std::exp(kernel.log_value(amenity.log_at(static_cast<std::size_t>(p.cell)), d) - shift);
  }
}

std::vector<double> finish_logs(const std::vector<double>& sums, double shift, double area) {
  std::vector<double> out(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i)
    out[i] = sums[i] > 0.0 ? shift + std::log(sums[i] * area) : -std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace

std::vector<double> log_integrals_serial(const DomainGrid& grid, const SiteFrame& frame, const Tessellation& tess,
                                         const AmenityField& amenity, const KernelSpec& kernel) {
  const double shift = kernel_shift(amenity, kernel);
  std::vector<double> sums(frame.size(), 0.0);
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    const int l = tess.labels[cell];
    if (l == kVacuum || tess.mixed[cell]) continue;
    const double d = frame.distance(static_cast<std::size_t>(l), grid.center(cell));
    sums[l] += std::exp(kernel.log_value(amenity.log_at(cell), d) - shift);
  }
  for (const CellPiece& p : tess.pieces) {
    const double d = frame.distance(static_cast<std::size_t>(p.site), p.centroid);
    sums[p.site] +=
        (p.area / grid.cell_area()) * std::exp(kernel.log_value(amenity.log_at(static_cast<std::size_t>(p.cell)), d) - shift);
  }
  return finish_logs(sums, shift, grid.cell_area());
}

std::vector<double> log_integrals_omp(const DomainGrid& grid, const SiteFrame& frame, const Tessellation& tess,
                                      const AmenityField& amenity, const KernelSpec& kernel) {
  const double shift = kernel_shift(amenity, kernel);
  const std::size_t n = frame.size();
  const int ny = grid.ny();
  std::vector<double> rows(static_cast<std::size_t>(ny) * n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < ny; ++iy)
    accumulate_row(grid, frame, tess, amenity, kernel, shift, iy, rows.data() + static_cast<std::size_t>(iy) * n);
  std::vector<double> sums(n, 0.0);
  for (int iy = 0; iy < ny; ++iy)
    for (std::size_t k = 0; k < n; ++k) sums[k] += rows[static_cast<std::size_t>(iy) * n + k];
  return finish_logs(sums, shift, grid.cell_area());
}

}  // namespace kernels
}  // namespace urbaneq
