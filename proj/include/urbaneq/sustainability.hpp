#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "urbaneq/analysis.hpp"
#include "urbaneq/equilibrium.hpp"

namespace urbaneq {

enum class SpilloverRegime { strong_spillover, weak_spillover, knife_edge };

const char* to_string(SpilloverRegime r) noexcept;

struct PotentialWeight {
  SpilloverRegime regime = SpilloverRegime::knife_edge;
  double value = 0.0;  // meaningful for knife_edge only

  bool finite() const { return regime == SpilloverRegime::knife_edge; }
};

//! Potential weight of geography site p, which must be vacant in sol.
PotentialWeight potential_weight(const EquilibriumSolution& sol, const Geography& geo, const ModelParams& params, int p);
//! Potential weight of an arbitrary candidate district; trade costs follow the metric.
PotentialWeight potential_weight(const EquilibriumSolution& sol, const Geography& geo, const ModelParams& params,
                                 const Site& candidate, double candidate_scale = 1.0);

enum class Verdict { sustainable, unsustainable, boundary };

const char* to_string(Verdict v) noexcept;

inline constexpr double kStabilityBoundaryTol = 1e-10;

struct VacantMargin {
  int site = 0;  // geography index
  int host = 0;  // geography index
  PotentialWeight weight;
  double lhs = 0.0;  // knife edge: delta st sigma (lambda_p - lambda_host + d_host(y_p))
  Verdict verdict = Verdict::sustainable;
};

struct SustainabilityReport {
  Verdict verdict = Verdict::sustainable;
  std::vector<VacantMargin> vacant;

  bool sustainable() const { return verdict == Verdict::sustainable; }
};

SustainabilityReport spatial_equilibrium_check(const EquilibriumSolution& sol, const Geography& geo,
                                               const ModelParams& params);

struct SubsetSpec {
  std::vector<int> sizes{2};
  int max_subsets = 256;
  std::uint64_t seed = 1;
  bool check_existence = true;
  ExistenceOptions existence;
  SolverOptions solver;
};

struct CatalogEntry {
  std::vector<int> subset;  // geography indices
  bool solved = false;
  std::string failure;
  EquilibriumSolution solution;
  SustainabilityReport sustainability;
  bool sustainable = false;
  double min_margin = 0.0;
  bool margins_pass = false;
  int duplicate_of = -1;
};

struct EquilibriumCatalog {
  std::string strategy;  // exhaustive | sampled
  std::uint64_t seed = 0;
  std::vector<CatalogEntry> entries;

  std::vector<const CatalogEntry*> sustainable_entries() const;
};

EquilibriumCatalog enumerate_urban_systems(const Geography& geo, const ModelParams& params, const SubsetSpec& spec);

struct SwapReport {
  std::vector<int> baseline_set, swapped_set;
  ExistenceReport baseline_margins, swapped_margins;
  double swap_distance = 0.0;
  double productivity_ratio = 0.0;  // A_c / A_p
  bool baseline_solved = false, swapped_solved = false;
  std::string baseline_failure, swapped_failure;
  EquilibriumSolution baseline, swapped;
};

SwapReport site_swap_experiment(const Geography& geo, const ModelParams& params, std::span<const int> y_star, int c,
                                int p, const ExistenceOptions& eopts = {}, const SolverOptions& sopts = {});

}  // namespace urbaneq
