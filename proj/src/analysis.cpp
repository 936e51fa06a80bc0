#include "urbaneq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "urbaneq/error.hpp"

namespace urbaneq {

const char* to_string(Multiplicity m) noexcept {
  switch (m) {
    case Multiplicity::spread: return "spread";
    case Multiplicity::knife_edge: return "knife_edge";
    case Multiplicity::multiple: return "multiple";
  }
  return "unknown";
}

Multiplicity classify_alpha(double alpha, double sigma) {
  const double cutoff = 1.0 / (sigma - 1.0);
  if (std::abs(alpha - cutoff) <= kKnifeEdgeTol) return Multiplicity::knife_edge;
  return alpha > cutoff ? Multiplicity::multiple : Multiplicity::spread;
}

UniquenessResult uniqueness_condition(const VariantSystem& sys, int n_star, double eta_hat) {
  if (std::abs(sys.gamma1) < 1e-12) throw Error(ErrorKind::DegenerateGamma1, "gamma1 = 0");
  if (n_star < 1) throw Error(ErrorKind::InvalidArgument, "n_star must be at least 1");
  if (!(eta_hat >= 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be non-negative");
  const double n = n_star;
  UniquenessResult r;
  r.lhs = std::abs(sys.gamma2 / sys.gamma1) +
          sys.sigma_tilde * (2.0 * (n - 1.0) * std::abs(sys.phi1) + (2.0 * n - 1.0) * std::abs(sys.phi2)) * eta_hat;
  r.holds = r.lhs < 1.0;
  return r;
}

double transformed_eta(double eta_lambda, const VariantSystem& sys) {
  return eta_lambda / (sys.weight_scale * std::abs(sys.gamma1));
}

ExistenceReport existence_check(const Geography& geo, const ModelParams& params, const ExistenceOptions& opts) {
  const VariantSystem sys = variant_transform(params);
  if (opts.use_sharper_trade_bound && geo.trade.origin != TradeOrigin::from_metric)
    throw Error(ErrorKind::NonMetricTradeCosts, "the sharper bound needs metric-generated trade costs");
  const std::size_t n = geo.size();
  const double sig = params.sigma;
  const double tau = geo.trade.origin == TradeOrigin::from_metric ? geo.trade.tau : params.tau;
  ExistenceReport rep;
  rep.hypothesis_value = sys.weight_scale * std::abs(sys.gamma1) - tau * (sig - 1.0);
  rep.precondition = rep.hypothesis_value > 0.0;
  if (n < 2) {
    rep.passes = true;
    return rep;
  }
  const std::vector<double> zero(n, 0.0);
  const Tessellation t = assign_labels(*geo.grid, geo.sites, geo.metric, zero);
  const CellAggregates agg = aggregate_amenities(t, geo, sys.kernel);
  rep.eta_hat = opts.eta_override ? *opts.eta_override
                                  : eta_sup_estimate(geo, sys.kernel, opts.k_shrink, opts.eta_samples, opts.seed).value;
  const PairwiseMetrics pm = pairwise_metrics(geo.sites, geo.metric);
  rep.r = pm.r;
  const double eta_term = -2.0 * sys.beta_eff * rep.eta_hat * rep.r;
  const double coef = opts.use_sharper_trade_bound ? rep.hypothesis_value : sys.weight_scale * std::abs(sys.gamma1);
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      PairMargin pmg;
      pmg.i = static_cast<int>(i);
      pmg.j = static_cast<int>(j);
      const double logb = agg.empty[i] || agg.empty[j]
                              ? std::numeric_limits<double>::infinity()
                              : std::abs(-sys.beta_eff * (agg.log_I[i] - agg.log_I[j]));
      pmg.lhs = sys.sigma_tilde * (sig - 1.0) * std::abs(std::log(geo.sites[i].productivity / geo.sites[j].productivity)) +
                sys.sigma_tilde * std::abs(sys.phi1) * logb + eta_term;
      if (!opts.use_sharper_trade_bound) {
        double access = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          access = std::max(access, std::abs(std::log(geo.trade(i, k)) - std::log(geo.trade(j, k))));
        pmg.lhs += (sig - 1.0) * access;
      }
      pmg.rhs = coef * pm.at(i, j);
      pmg.margin = pmg.rhs - pmg.lhs;
      rep.min_margin = std::min(rep.min_margin, pmg.margin);
      rep.pairs.push_back(pmg);
    }
  rep.passes = rep.min_margin >= 0.0;
  return rep;
}

Theorem3Report theorem3_check(const Geography& geo, const ModelParams& params, const ExistenceOptions& opts) {
  if (geo.size() < 2) throw Error(ErrorKind::SingleSite, "theorem 3 check needs at least two sites");
  Theorem3Report rep;
  rep.existence = existence_check(geo, params, opts);
  rep.hypothesis_value = rep.existence.hypothesis_value;
  rep.hypothesis_holds = rep.existence.precondition;
  rep.d_min = pairwise_metrics(geo.sites, geo.metric).d_min;
  rep.note = rep.hypothesis_holds ? "margins are proxies for d_min > d*; no certified threshold"
                                  : "hypothesis fails: never satisfiable at any spacing";
  return rep;
}

RegimeReport regime_classify(const ModelParams& params) {
  const VariantSystem sys = variant_transform(params);
  RegimeReport r;
  r.alpha_cutoff = 1.0 / (params.sigma - 1.0);
  r.location_multiplicity = classify_alpha(params.alpha, params.sigma);
  r.gamma1 = sys.gamma1;
  r.gamma2 = sys.gamma2;
  r.sigma_tilde = sys.sigma_tilde;
  r.phi1 = sys.phi1;
  r.phi2 = sys.phi2;
  r.gamma_ratio = sys.gamma1 == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(sys.gamma2 / sys.gamma1);
  r.labor_uniqueness = r.gamma_ratio < 1.0;
  r.reconciliation = r.location_multiplicity == Multiplicity::multiple && r.labor_uniqueness;
  return r;
}

RegimeReport regime_report(const Geography& geo, const ModelParams& params, std::span<const int> y_star,
                           const ExistenceOptions& opts) {
  RegimeReport r = regime_classify(params);
  const VariantSystem sys = variant_transform(params);
  const Geography sub = geo.subset(y_star);
  const EtaEstimate eta = eta_sup_estimate(sub, sys.kernel, opts.k_shrink, opts.eta_samples, opts.seed);
  r.eta_hat = eta.value;
  if (std::abs(sys.gamma1) >= 1e-12)
    r.uniqueness = uniqueness_condition(sys, static_cast<int>(sub.size()), transformed_eta(eta.value, sys));
  ExistenceOptions eo = opts;
  eo.eta_override = eta.value;
  if (eo.use_sharper_trade_bound && sub.trade.origin != TradeOrigin::from_metric) eo.use_sharper_trade_bound = false;
  r.existence = existence_check(sub, params, eo);
  if (sub.size() >= 2) r.theorem3 = theorem3_check(sub, params, eo);
  return r;
}

namespace {

double axis(double lo, double hi, int n, int k) { return n == 1 ? lo : lo + (hi - lo) * k / (n - 1); }

SweepCell sweep_cell(double alpha, double beta, double sigma) {
  SweepCell c;
  c.alpha = alpha;
  c.beta = beta;
  c.sigma = sigma;
  if (!(beta < 0.0) || !(alpha > -1.0) || !(sigma > 1.0)) {
    c.valid = false;
    return c;
  }
  ModelParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.sigma = sigma;
  const RegimeReport r = regime_classify(p);
  c.multiplicity = r.location_multiplicity;
  c.labor_unique = r.labor_uniqueness;
  c.gamma_ratio = r.gamma_ratio;
  c.category = 2 * static_cast<int>(c.multiplicity) + (c.labor_unique ? 1 : 0);
  return c;
}

}  // namespace

SweepResult parameter_sweep(const SweepSpec& spec) {
  if (spec.n_alpha < 2) throw Error(ErrorKind::InvalidArgument, "sweep needs at least two alpha points");
  if (!std::isfinite(spec.alpha_min) || !std::isfinite(spec.alpha_max) || !(spec.alpha_max > spec.alpha_min))
    throw Error(ErrorKind::InvalidArgument, "alpha range must be finite and increasing");
  SweepResult out;
  out.spec = spec;
  if (spec.panel == SweepPanel::alpha_beta) {
    if (spec.n_beta < 2 || !(spec.beta_max > spec.beta_min) || !std::isfinite(spec.beta_min) ||
        !std::isfinite(spec.beta_max))
      throw Error(ErrorKind::InvalidArgument, "beta range must be finite, increasing, with two points");
    if (!(spec.sigma > 1.0)) throw Error(ErrorKind::InvalidArgument, "sigma must exceed 1");
    for (int b = 0; b < spec.n_beta; ++b) {
      const double beta = axis(spec.beta_min, spec.beta_max, spec.n_beta, b);
      for (int a = 0; a < spec.n_alpha; ++a)
        out.cells.push_back(sweep_cell(axis(spec.alpha_min, spec.alpha_max, spec.n_alpha, a), beta, spec.sigma));
      // gamma2 = gamma1 on alpha = -beta; gamma2 = -gamma1 on alpha = beta - 2.
      for (double alpha : {-beta, beta - 2.0})
        if (alpha >= spec.alpha_min && alpha <= spec.alpha_max) out.labor_boundary.push_back({alpha, beta});
    }
  } else {
    if (spec.n_sigma < 2 || !(spec.sigma_max > spec.sigma_min) || !(spec.sigma_min > 1.0) ||
        !std::isfinite(spec.sigma_max))
      throw Error(ErrorKind::InvalidArgument, "sigma range must be finite, increasing, above 1, with two points");
    for (int s = 0; s < spec.n_sigma; ++s) {
      const double sigma = axis(spec.sigma_min, spec.sigma_max, spec.n_sigma, s);
      for (int a = 0; a < spec.n_alpha; ++a)
        out.cells.push_back(sweep_cell(axis(spec.alpha_min, spec.alpha_max, spec.n_alpha, a), spec.beta_fixed, sigma));
      const double cutoff = 1.0 / (sigma - 1.0);
      if (cutoff >= spec.alpha_min && cutoff <= spec.alpha_max) out.boundary.push_back({cutoff, sigma});
    }
  }
  return out;
}

ProbeReport multistart_uniqueness_probe(const Geography& geo, const ModelParams& params, std::span<const int> y_star,
                                        int n_starts, std::uint64_t seed, const SolverOptions& opts,
                                        double cluster_tol) {
  if (n_starts < 1) throw Error(ErrorKind::InvalidArgument, "n_starts must be at least 1");
  const Geography sub = geo.subset(y_star);
  const VariantSystem sys = variant_transform(params);
  const double scale = sys.weight_scale * sys.gamma1;
  const std::size_t n = sub.size();
  const auto i0 = static_cast<std::size_t>(opts.anchor);
  const PairwiseMetrics pm = pairwise_metrics(sub.sites, sub.metric, false);
  double d_max = 0.0;
  for (double d : pm.d) d_max = std::max(d_max, d);
  std::mt19937_64 rng(seed);

  ProbeReport rep;
  std::vector<double> lambda(n, 0.0);
  for (int s = 0; s < n_starts; ++s) {
    double half = 0.5 * opts.k_shrink * d_max;
    bool found = n < 2;
    for (int attempt = 0; attempt < 4000 && !found; ++attempt) {
      if (attempt > 0 && attempt % 1000 == 0) half *= 0.5;
      std::uniform_real_distribution<double> u(-half, half);
      for (auto& l : lambda) l = u(rng);
      found = true;
      for (std::size_t i = 0; i < n && found; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && !(lambda[i] - lambda[j] < opts.k_shrink * pm.at(i, j))) {
            found = false;
            break;
          }
    }
    if (!found) std::fill(lambda.begin(), lambda.end(), 0.0);
    SolverOptions o = opts;
    o.lambda_hat_init.resize(n);
    for (std::size_t i = 0; i < n; ++i) o.lambda_hat_init[i] = scale * (lambda[i] - lambda[i0]);
    ProbeStart ps;
    ps.index = s;
    const EquilibriumSolution sol = fixed_point_solve(geo, params, y_star, o);
    ps.status = sol.status;
    ps.residual = sol.residuals.lambda_eq;
    ps.differences.resize(n);
    for (std::size_t i = 0; i < n; ++i) ps.differences[i] = (sol.lambda_hat[i] - sol.lambda_hat[i0]) / scale;
    if (sol.converged()) {
      for (std::size_t c = 0; c < rep.clusters.size() && ps.cluster < 0; ++c) {
        double dist = 0.0;
        for (std::size_t i = 0; i < n; ++i) dist = std::max(dist, std::abs(rep.clusters[c][i] - ps.differences[i]));
        if (dist < cluster_tol) ps.cluster = static_cast<int>(c);
      }
      if (ps.cluster < 0) {
        ps.cluster = static_cast<int>(rep.clusters.size());
        rep.clusters.push_back(ps.differences);
      }
    }
    rep.starts.push_back(std::move(ps));
  }
  rep.unique = rep.clusters.size() == 1;
  return rep;
}

}  // namespace urbaneq
