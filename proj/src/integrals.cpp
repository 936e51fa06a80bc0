#include "urbaneq/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "urbaneq/error.hpp"

namespace urbaneq {

bool CellAggregates::any_empty() const { return std::any_of(empty.begin(), empty.end(), [](auto e) { return e != 0; }); }

CellAggregates aggregate_amenities(const Tessellation& tess, const Geography& geo, const KernelSpec& kernel) {
  if (!(kernel.beta_eff < 0.0)) throw Error(ErrorKind::InvalidArgument, "beta_eff must be negative");
  if (tess.labels.size() != geo.grid->size() || tess.site_count() != geo.size())
    throw Error(ErrorKind::InvalidArgument, "tessellation does not match geography");
  const auto frame = kernels::SiteFrame::make(geo.sites, geo.metric);
  CellAggregates agg;
  agg.log_I = kernels::log_integrals_omp(*geo.grid, frame, tess, *geo.amenity, kernel);
  const std::size_t n = geo.size();
  agg.B.assign(n, 0.0);
  agg.empty.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(agg.log_I[i]) || !tess.active(i)) {
      agg.empty[i] = 1;
      agg.log_I[i] = -std::numeric_limits<double>::infinity();
      continue;
    }
    agg.B[i] = std::exp(-kernel.beta_eff * agg.log_I[i]);
  }
  return agg;
}

double disk_kernel_oracle(double eps, double delta, double beta) {
  if (!(eps > 0.0 && delta > 0.0 && beta < 0.0))
    throw Error(ErrorKind::InvalidArgument, "disk oracle needs eps > 0, delta > 0, beta < 0");
  const double e = std::exp(delta * eps / beta);
  return 2.0 * std::numbers::pi * ((1.0 - e) * beta * beta / (delta * delta) + eps * e * beta / delta);
}

std::vector<double> resident_density(const Tessellation& tess, const Geography& geo, const KernelSpec& kernel,
                                     const CellAggregates& agg, std::span<const double> labor) {
  const std::size_t n = geo.size();
  if (labor.size() != n) throw Error(ErrorKind::InvalidArgument, "labor vector size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (labor[i] < 0.0) throw Error(ErrorKind::InvalidArgument, "negative labor mass");
    if (labor[i] > 0.0 && agg.empty[i])
      throw Error(ErrorKind::InactiveSiteWithMass, "site " + std::to_string(i) + " has mass but no area");
  }
  const auto& grid = *geo.grid;
  const auto& am = *geo.amenity;
  const auto frame = kernels::SiteFrame::make(geo.sites, geo.metric);
  std::vector<double> density(grid.size(), 0.0);
  auto value = [&](std::size_t site, std::size_t cell, Point x) {
    if (agg.empty[site]) return 0.0;
    return labor[site] * std::exp(kernel.log_value(am.log_at(cell), frame.distance(site, x)) - agg.log_I[site]);
  };
  const auto total = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < total; ++c) {
    const auto cell = static_cast<std::size_t>(c);
    const int l = tess.labels[cell];
    if (l == kVacuum || tess.mixed[cell]) continue;
    density[cell] = value(static_cast<std::size_t>(l), cell, grid.center(cell));
  }
  for (const auto& p : tess.pieces) {
    const auto cell = static_cast<std::size_t>(p.cell);
    density[cell] += (p.area / grid.cell_area()) * value(static_cast<std::size_t>(p.site), cell, p.centroid);
  }
  return density;
}

EtaValue eta_boundary_integral(const Tessellation& tess, const Geography& geo, const KernelSpec& kernel,
                               const CellAggregates& agg, int i, int k) {
  if (i == k) throw Error(ErrorKind::InvalidArgument, "eta needs distinct sites");
  EtaValue out;
  if (agg.empty[static_cast<std::size_t>(i)]) return out;
  const auto& am = *geo.amenity;
  double sum = 0.0;
  for (const auto& s : tess.interfaces) {
    if (s.site != i || s.other != k) continue;
    if (s.gradient_gap < kDegenerateNormal) {
      ++out.degenerate;
      continue;
    }
    const double d = geo.distance(static_cast<std::size_t>(i), s.midpoint);
    const double kern = std::exp(kernel.log_value(am.log_at(static_cast<std::size_t>(s.cell)), d) -
                                 agg.log_I[static_cast<std::size_t>(i)]);
    sum += kern * s.length / s.gradient_gap;
  }
  out.value = std::abs(kernel.beta_eff) * sum;
  return out;
}

namespace {

void eta_at(const Geography& geo, const KernelSpec& kernel, std::span<const double> lambda, EtaEstimate& est) {
  const Tessellation t = assign_labels(*geo.grid, geo.sites, geo.metric, lambda);
  const CellAggregates agg = aggregate_amenities(t, geo, kernel);
  for (std::size_t i = 0; i < geo.size(); ++i)
    for (int k : t.neighbors[i]) {
      const EtaValue e = eta_boundary_integral(t, geo, kernel, agg, static_cast<int>(i), k);
      est.value = std::max(est.value, e.value);
      est.degenerate += e.degenerate;
    }
  ++est.samples;
}

}  // namespace

EtaEstimate eta_sup_estimate(const Geography& geo, const KernelSpec& kernel, double k_shrink, int n_samples,
                             std::uint64_t seed) {
  if (!(k_shrink > 0.0 && k_shrink < 1.0)) throw Error(ErrorKind::InvalidArgument, "k_shrink must lie in (0, 1)");
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "n_samples must be at least 1");
  EtaEstimate est;
  const std::size_t n = geo.size();
  if (n < 2) return est;
  std::vector<double> lambda(n, 0.0);
  eta_at(geo, kernel, lambda, est);

  const PairwiseMetrics pm = pairwise_metrics(geo.sites, geo.metric);
  double d_max = 0.0;
  for (double d : pm.d) d_max = std::max(d_max, d);
  std::mt19937_64 rng(seed);
  double half = 0.5 * k_shrink * d_max;
  for (int s = 1; s < n_samples; ++s) {
    bool found = false;
    for (int attempt = 0; attempt < 4000 && !found; ++attempt) {
      if (attempt > 0 && attempt % 1000 == 0) half *= 0.5;
      std::uniform_real_distribution<double> u(-half, half);
      for (auto& l : lambda) l = u(rng);
      found = true;
      for (std::size_t i = 0; i < n && found; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && !(lambda[i] - lambda[j] < k_shrink * pm.at(i, j))) {
            found = false;
            break;
          }
    }
    if (!found) break;
    eta_at(geo, kernel, lambda, est);
  }
  return est;
}

}  // namespace urbaneq
