#include "urbaneq/error.hpp"

namespace urbaneq {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::EmptyDomain: return "EmptyDomain";
    case ErrorKind::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorKind::CoincidentSites: return "CoincidentSites";
    case ErrorKind::NonFiniteWeight: return "NonFiniteWeight";
    case ErrorKind::SingleSite: return "SingleSite";
    case ErrorKind::NonPositiveAmenity: return "NonPositiveAmenity";
    case ErrorKind::AsymmetricMetric: return "AsymmetricMetric";
    case ErrorKind::InactiveSiteWithMass: return "InactiveSiteWithMass";
    case ErrorKind::EmptyCellInSum: return "EmptyCellInSum";
    case ErrorKind::DegenerateGamma1: return "DegenerateGamma1";
    case ErrorKind::DegenerateConstantRecovery: return "DegenerateConstantRecovery";
    case ErrorKind::InvalidVariantParams: return "InvalidVariantParams";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::LeftFeasibleSet: return "LeftFeasibleSet";
    case ErrorKind::ZeroLabor: return "ZeroLabor";
    case ErrorKind::NonMetricTradeCosts: return "NonMetricTradeCosts";
    case ErrorKind::SiteNotVacant: return "SiteNotVacant";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace urbaneq
