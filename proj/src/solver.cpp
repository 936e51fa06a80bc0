#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "numeric.hpp"
#include "urbaneq/equilibrium.hpp"
#include "urbaneq/error.hpp"

namespace urbaneq {

const char* to_string(SolveStatus s) noexcept {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::not_converged: return "not_converged";
    case SolveStatus::left_feasible_set: return "left_feasible_set";
  }
  return "unknown";
}

void require_converged(const EquilibriumSolution& sol) {
  if (sol.status == SolveStatus::not_converged)
    throw Error(ErrorKind::NotConverged, "no fixed point after " + std::to_string(sol.iterations) + " iterations");
  if (sol.status == SolveStatus::left_feasible_set)
    throw Error(ErrorKind::LeftFeasibleSet, "iterates left the feasible weight set twice");
}

namespace {

using detail::kNegInf;

// g over all sites; in global mode the own-amenity factor is absent and empty cells drop out.
std::vector<double> weight_map(std::span<const double> u, const CompositeParams& comp, const CellAggregates& agg,
                               bool global) {
  if (!global) return g_map(u, comp, agg);
  const std::size_t n = comp.n;
  const double be = comp.sys.beta_eff, ratio = comp.sys.ratio();
  std::vector<double> g(n), terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      terms[j] = agg.empty[j] ? kNegInf
                              : comp.log_K[i * n + j] + comp.sys.exp_other() * (-be * agg.log_I[j]) + ratio * u[j];
    g[i] = detail::logsumexp(terms);
  }
  return g;
}

struct Evaluation {
  Tessellation tess;
  CellAggregates agg;
  bool feasible = false;
};

Evaluation evaluate(const Geography& geo, const CompositeParams& comp, std::span<const double> u) {
  const double scale = comp.sys.weight_scale * comp.sys.gamma1;
  std::vector<double> lambda(u.begin(), u.end());
  for (auto& l : lambda) l /= scale;
  Evaluation e;
  e.tess = assign_labels(*geo.grid, geo.sites, geo.metric, lambda);
  e.agg = aggregate_amenities(e.tess, geo, comp.sys.kernel);
  e.feasible = !e.agg.any_empty();
  return e;
}

// Radial pull of the weight differences onto the boundary of the k-shrunk set.
void reproject(std::vector<double>& u, double scale, const Geography& geo, double k) {
  const std::size_t n = u.size();
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = (u[i] - u[j]) / scale;
      if (i == j || diff <= 0.0) continue;
      t = std::min(t, k * geo.distance(i, geo.sites[j].position) / diff);
    }
  if (!(t < 1.0)) t = k;
  for (auto& x : u) x *= t;
}

struct IterationResult {
  std::vector<double> u;
  int iterations = 0;
  SolveStatus status = SolveStatus::not_converged;
  bool exited = false;
};

IterationResult iterate(const Geography& geo, const CompositeParams& comp, const SolverOptions& opts, bool global) {
  const std::size_t n = comp.n;
  const auto i0 = static_cast<std::size_t>(opts.anchor);
  const double scale = comp.sys.weight_scale * comp.sys.gamma1;
  IterationResult r;
  r.u = opts.lambda_hat_init.empty() ? std::vector<double>(n, 0.0) : opts.lambda_hat_init;
  if (r.u.size() != n) throw Error(ErrorKind::InvalidArgument, "initial weights have the wrong size");
  const double base = r.u[i0];
  for (auto& x : r.u) x -= base;
  int exits = 0;
  while (r.iterations < opts.max_iter) {
    const Evaluation e = evaluate(geo, comp, r.u);
    if (!global && !e.feasible) {
      r.exited = true;
      if (++exits >= 2) {
        r.status = SolveStatus::left_feasible_set;
        return r;
      }
      reproject(r.u, scale, geo, opts.k_shrink);
      continue;
    }
    ++r.iterations;
    const std::vector<double> g = weight_map(r.u, comp, e.agg, global);
    double step = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = (1.0 - opts.damping) * r.u[i] + opts.damping * (g[i] - g[i0]);
      step = std::max(step, std::abs(next - r.u[i]));
      r.u[i] = next;
    }
    r.u[i0] = 0.0;
    if (step < opts.tol) {
      r.status = SolveStatus::converged;
      return r;
    }
  }
  return r;
}

void check_options(const SolverOptions& o, std::size_t n) {
  if (!(o.damping > 0.0 && o.damping <= 1.0)) throw Error(ErrorKind::InvalidArgument, "damping must lie in (0, 1]");
  if (!(o.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be positive");
  if (o.max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be at least 1");
  if (!(o.k_shrink > 0.0 && o.k_shrink < 1.0)) throw Error(ErrorKind::InvalidArgument, "k_shrink must lie in (0, 1)");
  if (o.anchor < 0 || static_cast<std::size_t>(o.anchor) >= n)
    throw Error(ErrorKind::InvalidArgument, "anchor outside the solved set");
}

// Levels in original variables from differences, the anchor equation and the population constraint.
void recover_one_sector(EquilibriumSolution& sol, const CompositeParams& comp, const CellAggregates& agg,
                        std::span<const double> delta, std::size_t i0, bool global) {
  const ModelParams& p = sol.params;
  const VariantSystem& s = comp.sys;
  const std::size_t n = comp.n;
  const double rho = s.population_rate;
  const double dw = -s.beta_eff * rho;
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = agg.empty[i] ? kNegInf : agg.log_I[i] + rho * delta[i];
  const double logS = detail::logsumexp(terms);
  const double kg2 = s.weight_scale * s.gamma2;
  const double own = (global || agg.empty[i0]) ? 0.0 : s.exp_own() * (-s.beta_eff * agg.log_I[i0]);
  for (std::size_t j = 0; j < n; ++j)
    terms[j] = agg.empty[j] ? kNegInf
                            : comp.log_K[i0 * n + j] + own + s.exp_other() * (-s.beta_eff * agg.log_I[j]) + kg2 * delta[j];
  const double logG = detail::logsumexp(terms);
  const double logL = std::log(p.L);
  const double m = (p.alpha * (p.sigma - 1.0) * (logL - logS) + logG) / (dw * (p.sigma - 1.0));
  const double logV = p.beta * (logL - logS) + dw * m;
  sol.V = std::exp(logV);
  sol.lambda.resize(n);
  sol.L.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sol.lambda[i] = m + delta[i];
    if (!agg.empty[i]) sol.L[i] = std::exp(logV / p.beta + agg.log_I[i] + rho * sol.lambda[i]);
  }
}

void recover_two_sector(EquilibriumSolution& sol, const CompositeParams& comp, const CellAggregates& agg,
                        std::span<const double> delta) {
  const ModelParams& p = sol.params;
  const std::size_t n = comp.n;
  const double rho = comp.sys.population_rate;
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = agg.log_I[i] + rho * delta[i];
  const double logS = detail::logsumexp(terms);
  sol.L.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.L[i] = p.L * std::exp(terms[i] - logS);
}

void finish(EquilibriumSolution& sol, const Geography& sub, const CompositeParams& comp, const std::vector<double>& u,
            std::size_t i0, bool global) {
  const std::size_t n = comp.n;
  const VariantSystem& s = comp.sys;
  const double scale = s.weight_scale * s.gamma1;
  const Evaluation e = evaluate(sub, comp, u);
  if (!global && !e.feasible) {
    sol.note = "final iterate has an empty cell; levels not recovered";
    sol.tessellation = e.tess;
    return;
  }
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) delta[i] = u[i] / scale;
  const std::vector<double> g = weight_map(u, comp, e.agg, global);
  const double c = g[i0] / (1.0 - s.ratio());
  sol.lambda_tilde.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.lambda_tilde[i] = u[i] + c;
  sol.log_I = e.agg.log_I;
  sol.B = e.agg.B;

  std::vector<int> active;
  for (std::size_t i = 0; i < n; ++i)
    if (!e.agg.empty[i]) active.push_back(static_cast<int>(i));
  if (s.variant == Variant::two_sector) {
    recover_two_sector(sol, comp, e.agg, delta);
  } else {
    recover_one_sector(sol, comp, e.agg, delta, i0, global);
  }

  const Geography act = sub.subset(active);
  std::vector<double> La;
  for (int i : active) La.push_back(sol.L[static_cast<std::size_t>(i)]);
  MarketSolution mk;
  try {
    mk = market_equilibrium_solve(La, act, sol.params);
  } catch (const Error& err) {
    sol.note = err.what();
    sol.tessellation = e.tess;
    return;
  }
  sol.w.assign(n, 0.0);
  sol.P.assign(n, 0.0);
  sol.V_i.assign(n, 0.0);
  for (std::size_t a = 0; a < active.size(); ++a) {
    sol.w[static_cast<std::size_t>(active[a])] = mk.w[a];
    sol.P[static_cast<std::size_t>(active[a])] = mk.P[a];
  }
  sol.residuals.market = mk.residual;

  const ModelParams& p = sol.params;
  std::vector<double> gap, vi;
  if (s.variant == Variant::two_sector) {
    const double odds = (1.0 - p.mu) / p.mu, bt = p.beta_tilde;
    sol.lambda.assign(n, 0.0);
    for (int i : active) {
      const auto k = static_cast<std::size_t>(i);
      const double log_pa = -bt * std::log(odds) - bt * std::log(sol.L[k]) + std::log(sol.w[k]) + bt * sol.log_I[k];
      sol.lambda[k] = (log_pa - std::log(sol.P[k])) / p.delta;
      sol.V_i[k] = std::exp(odds * bt * std::log(odds) - bt * (1.0 - p.mu) * sol.log_I[k] +
                            p.mu * std::log(sol.w[k] / sol.P[k]) + bt * (1.0 - p.mu) * std::log(sol.L[k]));
      gap.push_back(sol.lambda[k] - delta[k]);
      vi.push_back(sol.V_i[k]);
    }
    sol.V = sol.V_i[i0];
  } else {
    for (int i : active) {
      const auto k = static_cast<std::size_t>(i);
      sol.V_i[k] = sol.B[k] * (sol.w[k] / sol.P[k]) * std::pow(sol.L[k], p.beta);
      gap.push_back(std::log(sol.w[k] / sol.P[k]) / s.weight_rate - sol.lambda[k]);
      vi.push_back(sol.V_i[k]);
    }
  }
  sol.residuals.identity_spread = detail::spread(gap);
  const auto [vlo, vhi] = std::minmax_element(vi.begin(), vi.end());
  sol.residuals.welfare_spread = *vhi / *vlo - 1.0;
  double total = 0.0;
  for (double l : sol.L) total += l;
  sol.residuals.population_slack = std::abs(total - p.L) / p.L;
  sol.tessellation = e.tess;
  sol.levels_recovered = true;
  sol.residuals.lambda_eq = lambda_eq_residual(sol, sub);
}

}  // namespace

EquilibriumSolution fixed_point_solve(const Geography& geo, const ModelParams& params, std::span<const int> y_star,
                                      const SolverOptions& opts) {
  params.validate();
  if (y_star.empty()) throw Error(ErrorKind::InvalidArgument, "empty active set");
  std::set<int> uniq(y_star.begin(), y_star.end());
  if (uniq.size() != y_star.size()) throw Error(ErrorKind::InvalidArgument, "active set has repeated sites");
  const Geography sub = geo.subset(y_star);
  check_options(opts, sub.size());
  const CompositeParams comp = composite_params(params, sub.sites, sub.trade);
  if (std::abs(1.0 - comp.sys.ratio()) < 1e-10)
    throw Error(ErrorKind::DegenerateConstantRecovery, "gamma1 == gamma2; the additive constant is not identified");

  EquilibriumSolution sol;
  sol.params = params;
  sol.site_ids.assign(y_star.begin(), y_star.end());
  sol.anchor = opts.anchor;
  const IterationResult it = iterate(sub, comp, opts, false);
  sol.lambda_hat = it.u;
  sol.iterations = it.iterations;
  sol.status = it.status;
  sol.exited_feasible = it.exited;
  finish(sol, sub, comp, it.u, static_cast<std::size_t>(opts.anchor), false);
  return sol;
}

EquilibriumSolution theorem2_global_solve(const Geography& geo, const ModelParams& params, const SolverOptions& opts) {
  if (params.variant != Variant::baseline)
    throw Error(ErrorKind::InvalidArgument, "the global system is defined for the baseline model");
  const double knife = 1.0 / (params.sigma - 1.0);
  if (std::abs(params.alpha - knife) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "global solve requires alpha = 1/(sigma-1)");
  ModelParams p = params;
  p.alpha = knife;
  p.validate();
  check_options(opts, geo.size());
  const CompositeParams comp = composite_params(p, geo.sites, geo.trade);
  if (std::abs(1.0 - comp.sys.ratio()) < 1e-10)
    throw Error(ErrorKind::DegenerateConstantRecovery, "gamma1 == gamma2; the additive constant is not identified");

  EquilibriumSolution sol;
  sol.params = p;
  for (std::size_t i = 0; i < geo.size(); ++i) sol.site_ids.push_back(static_cast<int>(i));
  sol.anchor = opts.anchor;
  const IterationResult it = iterate(geo, comp, opts, true);
  sol.lambda_hat = it.u;
  sol.iterations = it.iterations;
  sol.status = it.status;
  finish(sol, geo, comp, it.u, static_cast<std::size_t>(opts.anchor), true);
  return sol;
}

double lambda_eq_residual(const EquilibriumSolution& sol, const Geography& geo_sub) {
  const ModelParams& p = sol.params;
  const CompositeParams comp = composite_params(p, geo_sub.sites, geo_sub.trade);
  const VariantSystem& s = comp.sys;
  const std::size_t n = comp.n;
  const Tessellation t = assign_labels(*geo_sub.grid, geo_sub.sites, geo_sub.metric, sol.lambda);
  const CellAggregates agg = aggregate_amenities(t, geo_sub, s.kernel);
  const double kg1 = s.weight_scale * s.gamma1, kg2 = s.weight_scale * s.gamma2;
  std::vector<double> rhs(n, kNegInf), terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool drop_own = agg.empty[i];
    if (drop_own && std::abs(s.exp_own()) > 1e-9) continue;
    const double own = drop_own ? 0.0 : s.exp_own() * (-s.beta_eff * agg.log_I[i]);
    for (std::size_t j = 0; j < n; ++j)
      terms[j] = agg.empty[j] ? kNegInf
                              : comp.log_K[i * n + j] + own + s.exp_other() * (-s.beta_eff * agg.log_I[j]) +
                                    kg2 * sol.lambda[j];
    rhs[i] = detail::logsumexp(terms);
  }
  double res = 0.0;
  if (s.variant == Variant::two_sector) {
    const auto i0 = static_cast<std::size_t>(sol.anchor);
    for (std::size_t i = 0; i < n; ++i)
      if (std::isfinite(rhs[i]))
        res = std::max(res, std::abs(kg1 * (sol.lambda[i] - sol.lambda[i0]) - (rhs[i] - rhs[i0])));
    return res;
  }
  const double vterm = (p.sigma - 1.0) * p.alpha / p.beta * std::log(sol.V);
  for (std::size_t i = 0; i < n; ++i)
    if (std::isfinite(rhs[i])) res = std::max(res, std::abs(kg1 * sol.lambda[i] - vterm - rhs[i]));
  return res;
}

}  // namespace urbaneq
