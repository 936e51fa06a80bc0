// Serial reference vs OpenMP kernels: timing and bitwise agreement.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <random>

#include "urbaneq/kernels.hpp"

using namespace urbaneq;

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 512;
  const int n_sites = argc > 2 ? std::atoi(argv[2]) : 8;
  const int reps = 5;
  const auto grid = DomainGrid::build({0, 0, 1, 1}, n, n, [](Point p) { return std::hypot(p.x - 0.5, p.y - 0.5) < 0.5; });
  const AmenityField amenity = amenity_from_function(grid, [](Point p) { return 1.0 + 0.5 * p.x * p.y; });
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.25, 0.75), w(-0.05, 0.05);
  std::vector<Site> sites;
  std::vector<double> lambda;
  for (int i = 0; i < n_sites; ++i) {
    sites.push_back({i, {u(rng), u(rng)}, 1.0});
    lambda.push_back(w(rng));
  }
  const DistanceSystem metric;
  const auto frame = kernels::SiteFrame::make(sites, metric);
  const KernelSpec kernel = KernelSpec::make(-0.3, 10.0);

  std::printf("grid %dx%d, %d sites, %d threads\n", n, n, n_sites, omp_get_max_threads());
  Tessellation ts, to;
  const double tp_s = best_of(reps, [&] { ts = kernels::partition_serial(grid, frame, lambda); });
  const double tp_o = best_of(reps, [&] { to = kernels::partition_omp(grid, frame, lambda); });
  std::vector<int> ls, lo;
  const double tl_s = best_of(reps, [&] { ls = kernels::labels_serial(grid, frame, lambda); });
  const double tl_o = best_of(reps, [&] { lo = kernels::labels_omp(grid, frame, lambda); });
  std::vector<double> is, io;
  const double ti_s = best_of(reps, [&] { is = kernels::log_integrals_serial(grid, frame, ts, amenity, kernel); });
  const double ti_o = best_of(reps, [&] { io = kernels::log_integrals_omp(grid, frame, ts, amenity, kernel); });

  const bool same_part = ts.labels == to.labels && ts.pieces.size() == to.pieces.size() &&
                         ts.interfaces.size() == to.interfaces.size();
  const bool same_labels = ls == lo;
  // Different summation order: compare to rounding.
  double max_rel = 0.0;
  for (std::size_t i = 0; i < is.size(); ++i)
    if (std::isfinite(is[i])) max_rel = std::max(max_rel, std::abs(std::expm1(io[i] - is[i])));
  const bool same_int = is.size() == io.size() && max_rel < 1e-12;
  std::printf("%-14s %10s %10s %8s %s\n", "kernel", "serial_s", "omp_s", "speedup", "agree");
  std::printf("%-14s %10.4f %10.4f %8.2f %s\n", "partition", tp_s, tp_o, tp_s / tp_o, same_part ? "yes" : "NO");
  std::printf("%-14s %10.4f %10.4f %8.2f %s\n", "labels", tl_s, tl_o, tl_s / tl_o, same_labels ? "yes" : "NO");
  std::printf("%-14s %10.4f %10.4f %8.2f %s (max rel %.1e)\n", "log_integrals", ti_s, ti_o, ti_s / ti_o,
              same_int ? "yes" : "NO", max_rel);
  return same_part && same_labels && same_int ? 0 : 1;
}
