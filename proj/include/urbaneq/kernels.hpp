#pragma once

// Data-parallel cell kernels. Each has a plain serial reference and an OpenMP
// version; the OpenMP versions reduce per-row partials in row order so their
// output does not depend on the thread count.

#include <span>
#include <vector>

#include "urbaneq/fields.hpp"
#include "urbaneq/geometry.hpp"

namespace urbaneq {

//! Integrand (b(x) e^{-rate d_i(x)})^{amenity_exponent}; B_i = I_i^{-beta_eff}.
struct KernelSpec {
  double amenity_exponent = 1.0;  // -1/beta_eff
  double commuting_rate = 1.0;
  double beta_eff = -1.0;

  static KernelSpec make(double beta_eff, double commuting_rate);
  double log_value(double log_b, double distance) const {
    return amenity_exponent * (log_b - commuting_rate * distance);
  }
};

namespace kernels {

struct SiteFrame {
  std::vector<double> x, y, s;

  static SiteFrame make(const std::vector<Site>& sites, const DistanceSystem& metric);
  std::size_t size() const { return x.size(); }
  double distance(std::size_t i, Point p) const;
};

//! Labels, mixed-cell pieces and interface segments; measures are left empty.
Tessellation partition_serial(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda);
Tessellation partition_omp(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda);

//! Center-point labels only (no coverage work).
std::vector<int> labels_serial(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda);
std::vector<int> labels_omp(const DomainGrid& grid, const SiteFrame& frame, std::span<const double> lambda);

//! log I_i per site, -inf for sites without area.
std::vector<double> log_integrals_serial(const DomainGrid& grid, const SiteFrame& frame, const Tessellation& tess,
                                         const AmenityField& amenity, const KernelSpec& kernel);
std::vector<double> log_integrals_omp(const DomainGrid& grid, const SiteFrame& frame, const Tessellation& tess,
                                      const AmenityField& amenity, const KernelSpec& kernel);

}  // namespace kernels
}  // namespace urbaneq
