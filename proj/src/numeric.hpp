#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace urbaneq::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

//! log sum exp over entries; -inf entries contribute nothing.
inline double logsumexp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline double spread(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace urbaneq::detail
