#include "urbaneq/sustainability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "numeric.hpp"
#include "urbaneq/error.hpp"

namespace urbaneq {

const char* to_string(SpilloverRegime r) noexcept {
  switch (r) {
    case SpilloverRegime::strong_spillover: return "strong_spillover";
    case SpilloverRegime::weak_spillover: return "weak_spillover";
    case SpilloverRegime::knife_edge: return "knife_edge";
  }
  return "unknown";
}

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::sustainable: return "sustainable";
    case Verdict::unsustainable: return "unsustainable";
    case Verdict::boundary: return "boundary";
  }
  return "unknown";
}

namespace {

SpilloverRegime spillover_regime(const ModelParams& params) {
  switch (classify_alpha(params.alpha, params.sigma)) {
    case Multiplicity::multiple: return SpilloverRegime::strong_spillover;
    case Multiplicity::spread: return SpilloverRegime::weak_spillover;
    case Multiplicity::knife_edge: break;
  }
  return SpilloverRegime::knife_edge;
}

bool in_solution(const EquilibriumSolution& sol, int p) {
  return std::find(sol.site_ids.begin(), sol.site_ids.end(), p) != sol.site_ids.end();
}

// Knife-edge potential weight from a candidate's trade row and productivity.
double knife_edge_weight(const EquilibriumSolution& sol, const Geography& geo, const ModelParams& params,
                         double productivity, const std::vector<double>& log_T_row) {
  if (params.variant == Variant::two_sector)
    throw Error(ErrorKind::InvalidArgument, "potential weights are defined for the one-sector model");
  if (!sol.levels_recovered) throw Error(ErrorKind::InvalidArgument, "solution has no recovered levels");
  const VariantSystem sys = variant_transform(params);
  const double sig = params.sigma, st = sys.sigma_tilde;
  const std::size_t n = sol.site_ids.size();
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (sol.L[j] <= 0.0 || !std::isfinite(sol.log_I[j])) {
      terms[j] = detail::kNegInf;
      continue;
    }
    const Site& sj = geo.sites[static_cast<std::size_t>(sol.site_ids[j])];
    terms[j] = (1.0 - sig) * log_T_row[j] + st * (sig - 1.0) * std::log(productivity) +
               st * sig * std::log(sj.productivity) + sys.exp_other() * (-sys.beta_eff * sol.log_I[j]) +
               sys.weight_scale * sys.gamma2 * sol.lambda[j];
  }
  const double vterm = (sig - 1.0) * params.alpha / params.beta * std::log(sol.V);
  return (vterm + detail::logsumexp(terms)) / (sys.weight_scale * sys.gamma1);
}

}  // namespace

PotentialWeight potential_weight(const EquilibriumSolution& sol, const Geography& geo, const ModelParams& params,
                                 int p) {
  if (p < 0 || static_cast<std::size_t>(p) >= geo.size())
    throw Error(ErrorKind::InvalidArgument, "site index out of range");
  if (in_solution(sol, p)) throw Error(ErrorKind::SiteNotVacant, "site " + std::to_string(p) + " is in the active set");
  PotentialWeight w;
  w.regime = spillover_regime(params);
  if (!w.finite()) return w;
  std::vector<double> row;
  for (int j : sol.site_ids) row.push_back(std::log(geo.trade(static_cast<std::size_t>(p), static_cast<std::size_t>(j))));
  w.value = knife_edge_weight(sol, geo, params, geo.sites[static_cast<std::size_t>(p)].productivity, row);
  return w;
}

PotentialWeight potential_weight(const EquilibriumSolution& sol, const Geography& geo, const ModelParams& params,
                                 const Site& candidate, double /*candidate_scale*/) {
  PotentialWeight w;
  w.regime = spillover_regime(params);
  if (!w.finite()) return w;
  if (geo.trade.origin != TradeOrigin::from_metric)
    throw Error(ErrorKind::NonMetricTradeCosts, "candidate trade costs need metric-generated trade costs");
  std::vector<double> row;
  for (int j : sol.site_ids) {
    const auto k = static_cast<std::size_t>(j);
    row.push_back(geo.trade.tau * geo.distance(k, candidate.position));
  }
  w.value = knife_edge_weight(sol, geo, params, candidate.productivity, row);
  return w;
}

SustainabilityReport spatial_equilibrium_check(const EquilibriumSolution& sol, const Geography& geo,
                                               const ModelParams& params) {
  SustainabilityReport rep;
  const SpilloverRegime regime = spillover_regime(params);
  for (std::size_t p = 0; p < geo.size(); ++p) {
    const int ip = static_cast<int>(p);
    if (in_solution(sol, ip)) continue;
    VacantMargin vm;
    vm.site = ip;
    const long cell = geo.grid->cell_of(geo.sites[p].position);
    const int host_pos = cell < 0 ? 0 : sol.tessellation.labels[static_cast<std::size_t>(cell)];
    vm.host = sol.site_ids[static_cast<std::size_t>(std::max(host_pos, 0))];
    vm.weight.regime = regime;
    if (regime == SpilloverRegime::strong_spillover) {
      vm.lhs = -std::numeric_limits<double>::infinity();
      vm.verdict = Verdict::sustainable;
    } else if (regime == SpilloverRegime::weak_spillover) {
      vm.lhs = std::numeric_limits<double>::infinity();
      vm.verdict = Verdict::unsustainable;
    } else {
      vm.weight = potential_weight(sol, geo, params, ip);
      const VariantSystem sys = variant_transform(params);
      const auto h = static_cast<std::size_t>(host_pos);
      const double d = geo.distance(static_cast<std::size_t>(vm.host), geo.sites[p].position);
      vm.lhs = sys.weight_scale * sys.gamma1 * (vm.weight.value - sol.lambda[h] + d);
      vm.verdict = std::abs(vm.lhs) < kStabilityBoundaryTol ? Verdict::boundary
                   : vm.lhs < 0.0                           ? Verdict::sustainable
                                                            : Verdict::unsustainable;
    }
    if (vm.verdict == Verdict::unsustainable) {
      rep.verdict = Verdict::unsustainable;
    } else if (vm.verdict == Verdict::boundary && rep.verdict == Verdict::sustainable) {
      rep.verdict = Verdict::boundary;
    }
    rep.vacant.push_back(vm);
  }
  return rep;
}

std::vector<const CatalogEntry*> EquilibriumCatalog::sustainable_entries() const {
  std::vector<const CatalogEntry*> out;
  for (const auto& e : entries)
    if (e.sustainable && e.duplicate_of < 0) out.push_back(&e);
  return out;
}

namespace {

void combinations(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, out);
    cur.pop_back();
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

EquilibriumCatalog enumerate_urban_systems(const Geography& geo, const ModelParams& params, const SubsetSpec& spec) {
  const int n = static_cast<int>(geo.size());
  if (spec.max_subsets < 1) throw Error(ErrorKind::InvalidArgument, "max_subsets must be positive");
  for (int s : spec.sizes)
    if (s < 1 || s > n) throw Error(ErrorKind::InvalidArgument, "subset size " + std::to_string(s) + " out of range");
  std::set<int> sizes(spec.sizes.begin(), spec.sizes.end());
  double total = 0.0;
  for (int s : sizes) total += binomial(n, s);

  EquilibriumCatalog cat;
  cat.seed = spec.seed;
  std::vector<std::vector<int>> subsets;
  if (total <= spec.max_subsets) {
    cat.strategy = "exhaustive";
    for (int s : sizes) {
      std::vector<int> cur;
      combinations(n, s, 0, cur, subsets);
    }
  } else {
    cat.strategy = "sampled";
    std::mt19937_64 rng(spec.seed);
    std::vector<int> size_list(sizes.begin(), sizes.end());
    std::set<std::vector<int>> seen;
    std::vector<int> pool(static_cast<std::size_t>(n));
    while (static_cast<int>(subsets.size()) < spec.max_subsets) {
      const int k = size_list[std::uniform_int_distribution<std::size_t>(0, size_list.size() - 1)(rng)];
      for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
      for (int i = 0; i < k; ++i)
        std::swap(pool[static_cast<std::size_t>(i)],
                  pool[std::uniform_int_distribution<std::size_t>(static_cast<std::size_t>(i), pool.size() - 1)(rng)]);
      std::vector<int> sub(pool.begin(), pool.begin() + k);
      std::sort(sub.begin(), sub.end());
      if (seen.insert(sub).second) subsets.push_back(sub);
    }
    std::sort(subsets.begin(), subsets.end(),
              [](const auto& a, const auto& b) { return a.size() != b.size() ? a.size() < b.size() : a < b; });
  }

  for (const auto& subset : subsets) {
    CatalogEntry e;
    e.subset = subset;
    if (spec.check_existence) {
      try {
        ExistenceOptions eo = spec.existence;
        const Geography sub = geo.subset(subset);
        if (sub.trade.origin != TradeOrigin::from_metric) eo.use_sharper_trade_bound = false;
        const ExistenceReport ex = existence_check(sub, params, eo);
        e.min_margin = ex.pairs.empty() ? 0.0 : ex.min_margin;
        e.margins_pass = ex.passes;
      } catch (const Error& err) {
        e.failure = err.what();
      }
    }
    try {
      e.solution = fixed_point_solve(geo, params, subset, spec.solver);
      e.solved = e.solution.converged() && e.solution.levels_recovered;
      if (!e.solved && e.failure.empty())
        e.failure = e.solution.note.empty() ? to_string(e.solution.status) : e.solution.note;
    } catch (const Error& err) {
      e.failure = err.what();
    }
    if (e.solved) {
      e.sustainability = spatial_equilibrium_check(e.solution, geo, params);
      e.sustainable = e.sustainability.sustainable();
    }
    cat.entries.push_back(std::move(e));
  }

  // Dedup by active set and weight differences.
  for (std::size_t a = 0; a < cat.entries.size(); ++a) {
    auto& ea = cat.entries[a];
    if (!ea.solved) continue;
    for (std::size_t b = 0; b < a && ea.duplicate_of < 0; ++b) {
      const auto& eb = cat.entries[b];
      if (!eb.solved || eb.duplicate_of >= 0 || eb.solution.site_ids != ea.solution.site_ids) continue;
      double dist = 0.0;
      for (std::size_t i = 0; i < ea.solution.lambda.size(); ++i)
        dist = std::max(dist, std::abs((ea.solution.lambda[i] - ea.solution.lambda[0]) -
                                       (eb.solution.lambda[i] - eb.solution.lambda[0])));
      if (dist < 1e-6) ea.duplicate_of = static_cast<int>(b);
    }
  }
  return cat;
}

SwapReport site_swap_experiment(const Geography& geo, const ModelParams& params, std::span<const int> y_star, int c,
                                int p, const ExistenceOptions& eopts, const SolverOptions& sopts) {
  SwapReport rep;
  rep.baseline_set.assign(y_star.begin(), y_star.end());
  const auto it = std::find(rep.baseline_set.begin(), rep.baseline_set.end(), c);
  if (it == rep.baseline_set.end()) throw Error(ErrorKind::InvalidArgument, "swapped-out site is not in the active set");
  if (p != c && std::find(rep.baseline_set.begin(), rep.baseline_set.end(), p) != rep.baseline_set.end())
    throw Error(ErrorKind::SiteNotVacant, "swapped-in site is already active");
  rep.swapped_set = rep.baseline_set;
  rep.swapped_set[static_cast<std::size_t>(it - rep.baseline_set.begin())] = p;
  rep.swap_distance = geo.distance(static_cast<std::size_t>(c), geo.sites[static_cast<std::size_t>(p)].position);
  rep.productivity_ratio =
      geo.sites[static_cast<std::size_t>(c)].productivity / geo.sites[static_cast<std::size_t>(p)].productivity;

  auto run = [&](const std::vector<int>& set, ExistenceReport& margins, EquilibriumSolution& sol, bool& solved,
                 std::string& failure) {
    const Geography sub = geo.subset(set);
    ExistenceOptions eo = eopts;
    if (sub.trade.origin != TradeOrigin::from_metric) eo.use_sharper_trade_bound = false;
    margins = existence_check(sub, params, eo);
    try {
      sol = fixed_point_solve(geo, params, set, sopts);
      solved = sol.converged() && sol.levels_recovered;
      if (!solved) failure = sol.note.empty() ? to_string(sol.status) : sol.note;
    } catch (const Error& err) {
      failure = err.what();
    }
  };
  run(rep.baseline_set, rep.baseline_margins, rep.baseline, rep.baseline_solved, rep.baseline_failure);
  run(rep.swapped_set, rep.swapped_margins, rep.swapped, rep.swapped_solved, rep.swapped_failure);
  return rep;
}

}  // namespace urbaneq
