#include <cmath>
#include <string>

#include "numeric.hpp"
#include "urbaneq/equilibrium.hpp"
#include "urbaneq/error.hpp"

namespace urbaneq {

const char* to_string(Variant v) noexcept {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::home_consumption: return "home_consumption";
    case Variant::two_sector: return "two_sector";
  }
  return "unknown";
}

void ModelParams::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(sigma) || !(sigma > 1.0)) throw Error(ErrorKind::InvalidArgument, "sigma must exceed 1");
  if (!finite(alpha) || !(alpha > -1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must exceed -1");
  if (!finite(delta) || !(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  if (!finite(tau) || !(tau >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be non-negative");
  if (!finite(L) || !(L > 0.0)) throw Error(ErrorKind::InvalidArgument, "L must be positive");
  if (variant == Variant::two_sector) {
    if (!finite(mu) || !(mu > 0.0 && mu < 1.0))
      throw Error(ErrorKind::InvalidVariantParams, "two_sector needs 0 < mu < 1");
    if (!finite(beta_tilde) || !(beta_tilde < 0.0))
      throw Error(ErrorKind::InvalidVariantParams, "two_sector needs beta_tilde < 0");
  } else if (!finite(beta) || !(beta < 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "beta must be negative");
  }
}

VariantSystem variant_transform(const ModelParams& p) {
  p.validate();
  VariantSystem s;
  s.variant = p.variant;
  const double sig = p.sigma;
  double beta_c = p.beta;      // congestion inside the gammas
  double beta_e = p.beta;      // congestion in the amenity aggregate
  double pop_delta = p.delta;  // delta on lambda in the labor law
  double kernel_rate = p.delta;
  s.weight_rate = p.delta;
  switch (p.variant) {
    case Variant::baseline:
      break;
    case Variant::home_consumption:
      pop_delta = kernel_rate = s.weight_rate = p.delta + p.tau;
      break;
    case Variant::two_sector: {
      const double odds = (1.0 - p.mu) / p.mu;
      beta_c = odds * p.beta_tilde;
      beta_e = p.beta_tilde;
      pop_delta = p.delta * p.mu;
      kernel_rate = p.delta * (p.mu - p.beta_tilde * (1.0 - p.mu));
      break;
    }
  }
  s.sigma_tilde = (sig - 1.0) / (2.0 * sig - 1.0);
  s.gamma1 = 1.0 - (sig - 1.0) * p.alpha - sig * beta_c;
  s.gamma2 = 1.0 + sig * p.alpha + (sig - 1.0) * beta_c;
  s.phi1 = (1.0 - (sig - 1.0) * p.alpha) / beta_e;
  s.phi2 = -(1.0 + sig * p.alpha) / beta_e;
  s.beta_eff = beta_e;
  s.population_rate = -pop_delta / beta_e;
  s.weight_scale = s.population_rate * s.sigma_tilde;
  s.congestion_own = s.sigma_tilde * sig * beta_c / beta_e;
  s.congestion_other = s.sigma_tilde * (sig - 1.0) * beta_c / beta_e;
  s.kernel = KernelSpec::make(beta_e, kernel_rate);
  return s;
}

double CompositeParams::K(std::size_t i, std::size_t j) const { return std::exp(log_K[i * n + j]); }

CompositeParams composite_params(const ModelParams& params, const std::vector<Site>& sites,
                                 const TradeCostMatrix& trade) {
  CompositeParams c;
  c.sys = variant_transform(params);
  if (std::abs(c.sys.gamma1) < 1e-12) throw Error(ErrorKind::DegenerateGamma1, "gamma1 = 0");
  c.n = sites.size();
  if (trade.n != c.n) throw Error(ErrorKind::InvalidArgument, "trade matrix size differs from site count");
  const double sig = params.sigma, st = c.sys.sigma_tilde;
  c.log_K.resize(c.n * c.n);
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < c.n; ++j)
      c.log_K[i * c.n + j] = (1.0 - sig) * std::log(trade(i, j)) + st * (sig - 1.0) * std::log(sites[i].productivity) +
                             st * sig * std::log(sites[j].productivity);
  return c;
}

std::vector<double> g_map(std::span<const double> u, const CompositeParams& comp, const CellAggregates& agg) {
  const std::size_t n = comp.n;
  if (u.size() != n || agg.log_I.size() != n) throw Error(ErrorKind::InvalidArgument, "g_map size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (agg.empty[i]) throw Error(ErrorKind::EmptyCellInSum, "site " + std::to_string(i) + " has an empty cell");
  const double be = comp.sys.beta_eff, ratio = comp.sys.ratio();
  std::vector<double> g(n), terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double own = comp.sys.exp_own() * (-be * agg.log_I[i]);
    for (std::size_t j = 0; j < n; ++j)
      terms[j] = comp.log_K[i * n + j] + own + comp.sys.exp_other() * (-be * agg.log_I[j]) + ratio * u[j];
    g[i] = detail::logsumexp(terms);
  }
  return g;
}

std::vector<double> g_map(std::span<const double> u, const CompositeParams& comp, const Geography& geo) {
  const double scale = comp.sys.weight_scale * comp.sys.gamma1;
  std::vector<double> lambda(u.begin(), u.end());
  for (auto& l : lambda) l /= scale;
  const Tessellation t = assign_labels(*geo.grid, geo.sites, geo.metric, lambda);
  return g_map(u, comp, aggregate_amenities(t, geo, comp.sys.kernel));
}

}  // namespace urbaneq
