#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "urbaneq/analysis.hpp"
#include "urbaneq/equilibrium.hpp"
#include "urbaneq/sustainability.hpp"

namespace urbaneq {

//! Parsed run configuration; see docs/config.md for the schema.
struct RunConfig {
  std::string source;  // config path, for messages
  Geography geography;
  ModelParams params;
  SolverOptions solver;
  std::vector<int> active;  // geography indices of Y*
  std::uint64_t seed = 1;
  ExistenceOptions existence;
  int probe_starts = 0;  // 0: no probe
  SweepSpec sweep;
  SubsetSpec enumerate;
  int threads = 0;  // 0: all cores
  bool has_geography = false;
};

//! Throws Error(Config) with a line-anchored message.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source = "<string>",
                       const std::string& base_dir = ".");

}  // namespace urbaneq
