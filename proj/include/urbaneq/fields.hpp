#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "urbaneq/geometry.hpp"

namespace urbaneq {

//! Dense row-major raster, row 0 at ymin.
struct Raster {
  BBox bbox;
  int nx = 0, ny = 0;
  std::vector<double> values;
};

Raster read_raster(const std::string& path);
void write_raster(const std::string& path, const Raster& raster);

class AmenityField {
 public:
  AmenityField(const DomainGrid& grid, std::vector<double> samples);

  double at(std::size_t cell) const { return samples_[cell]; }
  double log_at(std::size_t cell) const { return log_samples_[cell]; }
  double b_min() const { return b_min_; }
  double b_max() const { return b_max_; }
  std::size_t argmin() const { return argmin_; }
  std::size_t argmax() const { return argmax_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  std::vector<double> samples_;
  std::vector<double> log_samples_;
  double b_min_ = 0.0, b_max_ = 0.0;
  std::size_t argmin_ = 0, argmax_ = 0;
};

AmenityField amenity_from_function(const DomainGrid& grid, const std::function<double(Point)>& f);
AmenityField amenity_from_raster(const DomainGrid& grid, const Raster& raster);

enum class TradeOrigin { from_metric, explicit_matrix };

struct TradeCostMatrix {
  std::size_t n = 0;
  std::vector<double> values;
  TradeOrigin origin = TradeOrigin::explicit_matrix;
  double tau = 0.0;

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  TradeCostMatrix subset(std::span<const int> indices) const;
};

TradeCostMatrix trade_costs_from_metric(const std::vector<Site>& sites, const DistanceSystem& metric, double tau);
TradeCostMatrix trade_costs_explicit(std::size_t n, std::vector<double> values);
TradeCostMatrix read_trade_csv(const std::string& path);

struct CommutingCost {
  double delta = 1.0;
  double factor(double distance) const;
};

//! The exogenous collection: domain, sites, metric, amenity and trade costs.
struct Geography {
  std::shared_ptr<const DomainGrid> grid;
  std::shared_ptr<const AmenityField> amenity;
  std::vector<Site> sites;
  DistanceSystem metric;
  TradeCostMatrix trade;

  static Geography create(std::shared_ptr<const DomainGrid> grid, std::shared_ptr<const AmenityField> amenity,
                          std::vector<Site> sites, DistanceSystem metric, TradeCostMatrix trade);

  std::size_t size() const { return sites.size(); }
  double distance(std::size_t i, Point x) const { return metric.distance(i, sites[i].position, x); }
  Geography subset(std::span<const int> indices) const;
};

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
};

ValidationReport validate_geography(const Geography& geo, std::uint64_t seed = 20240917,
                                    std::size_t triangle_samples = 10000);

}  // namespace urbaneq
