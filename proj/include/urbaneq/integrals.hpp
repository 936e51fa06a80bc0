#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "urbaneq/fields.hpp"
#include "urbaneq/geometry.hpp"
#include "urbaneq/kernels.hpp"

namespace urbaneq {

struct CellAggregates {
  std::vector<double> log_I;  // log raw integrals
  std::vector<double> B;      // I^{-beta_eff}; 0 for empty cells
  std::vector<std::uint8_t> empty;

  double log_B(std::size_t i, double beta_eff) const { return -beta_eff * log_I[i]; }
  bool any_empty() const;
};

CellAggregates aggregate_amenities(const Tessellation& tess, const Geography& geo, const KernelSpec& kernel);

//! Exact integral of e^{delta |x| / beta} over the disk of radius eps.
double disk_kernel_oracle(double eps, double delta, double beta);

//! Resident density per cell (mass per unit area); zero outside.
std::vector<double> resident_density(const Tessellation& tess, const Geography& geo, const KernelSpec& kernel,
                                     const CellAggregates& agg, std::span<const double> labor);

struct EtaValue {
  double value = 0.0;
  std::size_t degenerate = 0;  // interface pieces skipped for near-parallel gradients
};

inline constexpr double kDegenerateNormal = 1e-8;

//! |d log B_i / d lambda_k| from the moving-boundary integral.
EtaValue eta_boundary_integral(const Tessellation& tess, const Geography& geo, const KernelSpec& kernel,
                               const CellAggregates& agg, int i, int k);

struct EtaEstimate {
  double value = 0.0;  // in lambda units
  bool certified = false;
  std::size_t samples = 0;
  std::size_t degenerate = 0;
};

//! Max eta over lambda = 0 and rejection-sampled weights inside the k-shrunk feasible set.
EtaEstimate eta_sup_estimate(const Geography& geo, const KernelSpec& kernel, double k_shrink, int n_samples,
                             std::uint64_t seed);

}  // namespace urbaneq
