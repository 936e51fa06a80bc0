#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbaneq/fields.hpp"
#include "urbaneq/geometry.hpp"
#include "urbaneq/integrals.hpp"

namespace urbaneq {

enum class Variant { baseline, home_consumption, two_sector };

const char* to_string(Variant v) noexcept;

struct ModelParams {
  double sigma = 9.0;
  double alpha = 0.2;
  double beta = -0.3;
  double delta = 10.0;
  double tau = 0.1;
  double L = 1.0;
  Variant variant = Variant::baseline;
  double mu = 0.5;          // two_sector
  double beta_tilde = -0.3;  // two_sector

  void validate() const;
};

//! Constants the solver consumes for one variant.
struct VariantSystem {
  Variant variant = Variant::baseline;
  double gamma1 = 0.0, gamma2 = 0.0;
  double sigma_tilde = 0.0;
  double phi1 = 0.0, phi2 = 0.0;
  double beta_eff = 0.0;
  double weight_rate = 0.0;      // lambda = log(real price ratio) / weight_rate
  double population_rate = 0.0;  // L_i proportional to I_i e^{population_rate lambda_i}
  double weight_scale = 0.0;     // kappa = population_rate * sigma_tilde
  double congestion_own = 0.0;   // exponent on B_i in the labor form
  double congestion_other = 0.0;
  KernelSpec kernel;

  double ratio() const { return gamma2 / gamma1; }
  double exp_own() const { return sigma_tilde * phi1; }
  double exp_other() const { return sigma_tilde * phi2; }
};

VariantSystem variant_transform(const ModelParams& params);

struct CompositeParams {
  VariantSystem sys;
  std::size_t n = 0;
  std::vector<double> log_K;  // row-major

  double gamma1() const { return sys.gamma1; }
  double gamma2() const { return sys.gamma2; }
  double sigma_tilde() const { return sys.sigma_tilde; }
  double phi1() const { return sys.phi1; }
  double phi2() const { return sys.phi2; }
  double weight_scale() const { return sys.weight_scale; }
  double K(std::size_t i, std::size_t j) const;
};

CompositeParams composite_params(const ModelParams& params, const std::vector<Site>& sites,
                                 const TradeCostMatrix& trade);

//! g_i = log sum_j K_ij B_i^{st phi1} B_j^{st phi2} e^{(g2/g1) u_j}, u = kappa gamma1 lambda.
std::vector<double> g_map(std::span<const double> u, const CompositeParams& comp, const Geography& geo);
//! Same map from precomputed aggregates; throws EmptyCellInSum on an inactive site.
std::vector<double> g_map(std::span<const double> u, const CompositeParams& comp, const CellAggregates& agg);

struct SolverOptions {
  double damping = 0.5;
  double tol = 1e-12;
  int max_iter = 5000;
  double k_shrink = 0.5;
  int anchor = 0;                      // position inside Y*
  std::vector<double> lambda_hat_init;  // empty: zero
};

enum class SolveStatus { converged, not_converged, left_feasible_set };

const char* to_string(SolveStatus s) noexcept;

struct Residuals {
  double lambda_eq = 0.0;         // sup log residual of the weight system
  double market = 0.0;            // relative residual of the gravity block
  double welfare_spread = 0.0;    // max/min - 1 of V_i
  double population_slack = 0.0;  // |sum L_i - L| / L
  double identity_spread = 0.0;   // spread of log(real wage)/rate - lambda
};

struct EquilibriumSolution {
  ModelParams params;
  std::vector<int> site_ids;  // geography indices of the solved sites
  int anchor = 0;
  std::vector<double> lambda, lambda_hat, lambda_tilde;
  std::vector<double> L, w, P, B, log_I, V_i;
  double V = 0.0;
  Residuals residuals;
  int iterations = 0;
  SolveStatus status = SolveStatus::not_converged;
  bool exited_feasible = false;
  bool levels_recovered = false;
  std::string note;
  Tessellation tessellation;

  bool converged() const { return status == SolveStatus::converged; }
};

//! Throws NotConverged or LeftFeasibleSet for a failed solve.
void require_converged(const EquilibriumSolution& sol);

EquilibriumSolution fixed_point_solve(const Geography& geo, const ModelParams& params, std::span<const int> y_star,
                                      const SolverOptions& opts = {});

struct MarketOptions {
  double tol = 1e-13;
  int max_iter = 200;
};

struct MarketSolution {
  std::vector<double> w, P;
  double residual = 0.0;
  int iterations = 0;
};

//! Wages and price indices with sum_i w_i L_i = 1.
MarketSolution market_equilibrium_solve(std::span<const double> labor, const Geography& geo, const ModelParams& params,
                                        const MarketOptions& opts = {});

//! Global weight system over all sites at alpha = 1/(sigma-1); alpha is set by the solver.
EquilibriumSolution theorem2_global_solve(const Geography& geo, const ModelParams& params,
                                          const SolverOptions& opts = {});

//! Sup-norm log residual of the weight system, evaluated from a solution's fields.
double lambda_eq_residual(const EquilibriumSolution& sol, const Geography& geo_sub);

}  // namespace urbaneq
