#pragma once

#include <stdexcept>
#include <string>

namespace urbaneq {

enum class ErrorKind {
  InvalidArgument,
  EmptyDomain,
  DisconnectedDomain,
  CoincidentSites,
  NonFiniteWeight,
  SingleSite,
  NonPositiveAmenity,
  AsymmetricMetric,
  InactiveSiteWithMass,
  EmptyCellInSum,
  DegenerateGamma1,
  DegenerateConstantRecovery,
  InvalidVariantParams,
  NotConverged,
  LeftFeasibleSet,
  ZeroLabor,
  NonMetricTradeCosts,
  SiteNotVacant,
  Io,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}
  ErrorKind kind() const noexcept { return kind_; }
  //! Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace urbaneq
