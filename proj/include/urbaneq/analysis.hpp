#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "urbaneq/equilibrium.hpp"

namespace urbaneq {

enum class Multiplicity { spread, knife_edge, multiple };

const char* to_string(Multiplicity m) noexcept;

inline constexpr double kKnifeEdgeTol = 1e-12;

Multiplicity classify_alpha(double alpha, double sigma);

struct UniquenessResult {
  double lhs = 0.0;
  bool holds = false;
};

//! eta_hat in transformed units (see transformed_eta).
UniquenessResult uniqueness_condition(const VariantSystem& sys, int n_star, double eta_hat);

//! Semielasticity with respect to the transformed weights: eta / (kappa |gamma1|).
double transformed_eta(double eta_lambda, const VariantSystem& sys);

struct PairMargin {
  int i = 0, j = 0;  // positions inside the checked set
  double lhs = 0.0, rhs = 0.0, margin = 0.0;
};

struct ExistenceOptions {
  double k_shrink = 0.5;
  int eta_samples = 8;
  std::uint64_t seed = 1;
  bool use_sharper_trade_bound = true;
  std::optional<double> eta_override;  // lambda units
};

struct ExistenceReport {
  std::vector<PairMargin> pairs;
  double hypothesis_value = 0.0;  // -(delta/beta) st |gamma1| - tau (sigma - 1)
  bool precondition = false;
  double eta_hat = 0.0;
  double r = 0.0;
  double min_margin = 0.0;
  bool passes = false;
};

ExistenceReport existence_check(const Geography& geo, const ModelParams& params, const ExistenceOptions& opts = {});

struct Theorem3Report {
  double hypothesis_value = 0.0;
  bool hypothesis_holds = false;
  double d_min = 0.0;
  ExistenceReport existence;
  std::string note;
};

Theorem3Report theorem3_check(const Geography& geo, const ModelParams& params, const ExistenceOptions& opts = {});

struct RegimeReport {
  double alpha_cutoff = 0.0;
  Multiplicity location_multiplicity = Multiplicity::spread;
  double gamma1 = 0.0, gamma2 = 0.0;
  double sigma_tilde = 0.0, phi1 = 0.0, phi2 = 0.0;
  double gamma_ratio = 0.0;
  bool labor_uniqueness = false;
  bool reconciliation = false;
  std::optional<double> eta_hat;  // lambda units
  std::optional<UniquenessResult> uniqueness;
  std::optional<ExistenceReport> existence;
  std::optional<Theorem3Report> theorem3;
};

RegimeReport regime_classify(const ModelParams& params);

//! Regime plus the geography-dependent conditions on the active set.
RegimeReport regime_report(const Geography& geo, const ModelParams& params, std::span<const int> y_star,
                           const ExistenceOptions& opts = {});

enum class SweepPanel { alpha_beta, alpha_sigma };

struct SweepSpec {
  SweepPanel panel = SweepPanel::alpha_beta;
  double alpha_min = 0.0, alpha_max = 0.6;
  int n_alpha = 61;
  double beta_min = -0.6, beta_max = 0.0;  // beta == 0 points are skipped as invalid
  int n_beta = 61;
  double sigma = 9.0;  // alpha_beta panel
  double sigma_min = 2.0, sigma_max = 12.0;
  int n_sigma = 51;
  double beta_fixed = -0.3;  // alpha_sigma panel
};

struct SweepCell {
  double alpha = 0.0, beta = 0.0, sigma = 0.0;
  Multiplicity multiplicity = Multiplicity::spread;
  bool labor_unique = false;
  bool valid = true;
  double gamma_ratio = 0.0;
  int category = 0;  // 2 * multiplicity + labor_unique
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;     // row-major, rows along the second axis
  std::vector<Point> boundary;      // (alpha, sigma) vertices of alpha = 1/(sigma-1)
  std::vector<Point> labor_boundary;  // (alpha, beta) vertices of |gamma2/gamma1| = 1
};

SweepResult parameter_sweep(const SweepSpec& spec);

struct ProbeStart {
  int index = 0;
  SolveStatus status = SolveStatus::not_converged;
  std::vector<double> differences;  // lambda_i - lambda_anchor
  double residual = 0.0;
  int cluster = -1;
};

struct ProbeReport {
  bool unique = false;
  std::vector<std::vector<double>> clusters;
  std::vector<ProbeStart> starts;
};

ProbeReport multistart_uniqueness_probe(const Geography& geo, const ModelParams& params, std::span<const int> y_star,
                                        int n_starts, std::uint64_t seed, const SolverOptions& opts = {},
                                        double cluster_tol = 1e-6);

}  // namespace urbaneq
