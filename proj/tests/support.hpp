#pragma once

// Fixtures and independent oracles shared by unit and acceptance tests.
// Oracles use only raw inputs and plain loops; they do not call the solver.

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <vector>

#include "urbaneq/equilibrium.hpp"

namespace support {

using namespace urbaneq;

inline std::shared_ptr<const DomainGrid> square(int n, BBox box = {0, 0, 1, 1}) {
  return std::make_shared<DomainGrid>(DomainGrid::build(box, n, n, [](Point) { return true; }));
}

inline Geography geography(std::vector<Site> sites, int n = 64, double tau = 0.1,
                           std::function<double(Point)> amenity = [](Point) { return 1.0; },
                           std::shared_ptr<const DomainGrid> grid = nullptr) {
  if (!grid) grid = square(n);
  auto field = std::make_shared<AmenityField>(amenity_from_function(*grid, amenity));
  const DistanceSystem metric;
  TradeCostMatrix trade = trade_costs_from_metric(sites, metric, tau);
  return Geography::create(grid, field, std::move(sites), metric, std::move(trade));
}

inline std::vector<Site> symmetric_pair(double a = 1.0) {
  return {{0, {0.25, 0.5}, a}, {1, {0.75, 0.5}, a}};
}

inline std::vector<Site> asymmetric_triple() {
  return {{0, {0.25, 0.5}, 1.0}, {1, {0.75, 0.4}, 1.1}, {2, {0.5, 0.8}, 0.9}};
}

inline std::vector<int> all(std::size_t n) {
  std::vector<int> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i);
  return v;
}

// Per-cell exhaustive argmin at the cell center, lowest index on ties.
inline std::vector<int> brute_labels(const DomainGrid& g, const std::vector<Site>& sites,
                                     const std::vector<double>& scales, const std::vector<double>& lambda) {
  std::vector<int> out(g.size(), kVacuum);
  for (int iy = 0; iy < g.ny(); ++iy)
    for (int ix = 0; ix < g.nx(); ++ix) {
      const std::size_t c = static_cast<std::size_t>(iy) * g.nx() + ix;
      if (!g.mask()[c]) continue;
      const double x = g.bbox().xmin + (ix + 0.5) * g.dx(), y = g.bbox().ymin + (iy + 0.5) * g.dy();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const double s = scales.empty() ? 1.0 : scales[i];
        const double v = s * std::hypot(x - sites[i].position.x, y - sites[i].position.y) - lambda[i];
        if (v < best) {
          best = v;
          out[c] = static_cast<int>(i);
        }
      }
    }
  return out;
}

// Midpoint rule for the disk kernel integral on an n x n grid over [-eps, eps]^2.
inline double disk_midpoint(double eps, double delta, double beta, int n) {
  const double h = 2.0 * eps / n;
  double sum = 0.0;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const double x = -eps + (ix + 0.5) * h, y = -eps + (iy + 0.5) * h;
      const double r = std::hypot(x, y);
      if (r < eps) sum += std::exp(delta * r / beta);
    }
  return sum * h * h;
}

// Composite constants by hand from the defining formulas.
struct Hand {
  double g1, g2, st, phi1, phi2;
};

inline Hand hand_baseline(double sigma, double alpha, double beta) {
  return {1 - (sigma - 1) * alpha - sigma * beta, 1 + sigma * alpha + (sigma - 1) * beta,
          (sigma - 1) / (2 * sigma - 1), (1 - (sigma - 1) * alpha) / beta, -(1 + sigma * alpha) / beta};
}

inline Hand hand_two_sector(double sigma, double alpha, double mu, double bt) {
  const double c = (1 - mu) / mu * bt;
  return {1 - (sigma - 1) * alpha - sigma * c, 1 + sigma * alpha + (sigma - 1) * c, (sigma - 1) / (2 * sigma - 1),
          (1 - (sigma - 1) * alpha) / bt, -(1 + sigma * alpha) / bt};
}

// Dense evaluation of the weight system in logs for the one-sector baseline:
// both sides recomputed from raw T, A, the given B and V.
inline double lambda_eq_log_residual(const Geography& sub, const ModelParams& p, const std::vector<double>& lambda,
                                     const std::vector<double>& B, double V) {
  const Hand h = hand_baseline(p.sigma, p.alpha, p.beta);
  const std::size_t n = sub.size();
  double res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lhs = -(p.delta / p.beta) * h.st * h.g1 * lambda[i];
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      sum += std::pow(sub.trade(i, j), 1 - p.sigma) * std::pow(sub.sites[i].productivity, h.st * (p.sigma - 1)) *
             std::pow(sub.sites[j].productivity, h.st * p.sigma) * std::pow(B[i], h.st * h.phi1) *
             std::pow(B[j], h.st * h.phi2) * std::exp(-(p.delta / p.beta) * h.st * h.g2 * lambda[j]);
    const double rhs = (p.sigma - 1) * p.alpha / p.beta * std::log(V) + std::log(sum);
    res = std::max(res, std::abs(lhs - rhs));
  }
  return res;
}

// Independent B_i: coverage-weighted pieces summed directly from the tessellation.
inline std::vector<double> recompute_B(const Geography& sub, const Tessellation& t, double beta, double rate) {
  const DomainGrid& g = *sub.grid;
  std::vector<double> I(sub.size(), 0.0);
  const double e = -1.0 / beta;
  for (std::size_t c = 0; c < g.size(); ++c) {
    if (t.labels[c] < 0 || t.mixed[c]) continue;
    const auto i = static_cast<std::size_t>(t.labels[c]);
    I[i] += std::pow(sub.amenity->at(c) * std::exp(-rate * sub.distance(i, g.center(c))), e) * g.cell_area();
  }
  for (const auto& piece : t.pieces) {
    const auto i = static_cast<std::size_t>(piece.site);
    I[i] += std::pow(sub.amenity->at(static_cast<std::size_t>(piece.cell)) *
                         std::exp(-rate * sub.distance(i, piece.centroid)),
                     e) *
            piece.area;
  }
  std::vector<double> B(I.size());
  for (std::size_t i = 0; i < I.size(); ++i) B[i] = std::pow(I[i], -beta);
  return B;
}

// V and L from the population constraint in original variables.
inline double population_V(const std::vector<double>& B, const std::vector<double>& lambda, const ModelParams& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < B.size(); ++i)
    s += std::pow(B[i], -1.0 / p.beta) * std::exp(-p.delta * lambda[i] / p.beta);
  return std::pow(s, -p.beta) * std::pow(p.L, p.beta);
}

}  // namespace support
