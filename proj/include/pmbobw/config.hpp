#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmbobw/environment.hpp"
#include "pmbobw/exobopt.hpp"
#include "pmbobw/game.hpp"

namespace pmbobw {

enum class Algorithm { kBobwLocal, kBobwGlobal, kFixedRateBaseline };

const char* AlgorithmName(Algorithm algorithm);

struct RateOverrides {
  std::optional<double> c1;
  std::optional<double> c2;
  std::optional<double> lower_beta;  // "B"
  std::optional<double> beta1;
  std::optional<double> eta;         // fixed-rate baseline
  std::optional<double> gamma;       // baseline, or frozen exploration rate
};

struct SolverConfig {
  SolverOptions options;
  int solve_every = 1;
};

// Everything one episode needs apart from the game and the seed.
struct EpisodeSpec {
  Algorithm algorithm = Algorithm::kBobwLocal;
  int horizon = 1000;
  EnvironmentSpec environment;
  RateOverrides rates;
  SolverConfig solver;
  bool debug_asserts = false;
};

struct SweepSpec {
  std::vector<int> horizons;
  std::vector<double> budgets;
};

struct RunConfig {
  std::optional<Game> game;
  EpisodeSpec episode;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";
  bool write_traces = true;
  std::optional<SweepSpec> sweep;
  nlohmann::json source;
};

// Applies "a.b.c=value" overrides; value is parsed as JSON when possible.
void ApplyOverride(nlohmann::json& doc, const std::string& assignment);

// Game references are resolved relative to `base_dir`. Unknown keys throw
// InvalidConfig.
RunConfig ParseRunConfig(const nlohmann::json& doc, const std::string& base_dir = ".");
RunConfig LoadRunConfig(const std::string& path,
                        const std::vector<std::string>& overrides = {});

// "1,2,5-8" -> {1,2,5,6,7,8}.
std::vector<std::uint64_t> ParseSeedList(const std::string& text);

}  // namespace pmbobw
