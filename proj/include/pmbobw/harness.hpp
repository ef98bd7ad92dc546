#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pmbobw/config.hpp"
#include "pmbobw/estimation.hpp"
#include "pmbobw/game.hpp"
#include "pmbobw/geometry.hpp"

namespace pmbobw {

// Game-level data shared by every episode of a run.
struct PreparedGame {
  Game game;
  GameClass cls;
  SymbolStats stats;
  std::optional<GlobalEstimator> estimator;  // absent for trivial games

  const GameGeometry& geometry() const { return cls.geometry; }
  bool trivial() const { return cls.tag == GameClassTag::kTrivial; }
};

// Classifies the game and builds the estimator the algorithm needs. Throws
// ClassificationMismatch when the algorithm does not fit the class and
// DegenerateGame when the local algorithm meets degenerate actions.
PreparedGame PrepareGame(const Game& game, Algorithm algorithm);

// Schedule constants after defaults and overrides.
struct ResolvedRates {
  double c1 = 0.0;
  double c2 = 0.0;
  double lower_beta = 0.0;
  double beta1 = 0.0;
  double eta = 0.0;
  std::optional<double> gamma;
};

ResolvedRates ResolveRates(const PreparedGame& prepared, const EpisodeSpec& spec);

struct InvariantReport {
  long restricted_simplex = 0;  // p_t < q_t/(2k)
  long eta_bound = 0;           // eta_t > 1/(2mk^2)
  long v_prime_negative = 0;
  long gamma_bound = 0;         // gamma_t > 1/2
  long exploration_floor = 0;   // p_{t,a} < gamma_t/k
  long beta_decrease = 0;
  long lemma5 = 0;              // 1 when the entropy bound fails

  long total() const {
    return restricted_simplex + eta_bound + v_prime_negative + gamma_bound +
           exploration_floor + beta_decrease + lemma5;
  }
};

// Full per-round log of one episode. Vectors are indexed by t - 1.
struct RunTrace {
  Algorithm algorithm = Algorithm::kBobwLocal;
  std::uint64_t seed = 0;
  int horizon = 0;
  int k = 0;
  int k_pi = 0;
  bool corrupted = false;
  bool has_gamma = false;
  bool has_v_prime = false;
  bool has_rate = false;
  bool solve_every_deviation = false;

  std::vector<int> actions;
  std::vector<int> outcomes;
  std::vector<int> outcomes_pre;
  std::vector<int> symbols;
  std::vector<double> losses;
  std::vector<double> q;  // row-major T x k
  std::vector<double> p;  // row-major T x k
  std::vector<double> entropy;
  std::vector<double> rate;  // eta_t (local, baseline) or beta_t (global)
  std::vector<double> gamma;
  std::vector<double> v_prime;
  std::vector<double> solver_eps;
  std::vector<int> solver_iterations;
  std::vector<double> expected_regret_increment;  // empty without a distribution

  // Filled by FinalizeTrace.
  int hindsight_action = 0;
  std::vector<double> regret_curve;
  std::vector<double> q_astar_curve;
  double entropy_sum = 0.0;
  double lemma5_margin = 0.0;
  double realized_corruption = 0.0;
  double corruption_budget = 0.0;
  double wall_time_seconds = 0.0;
  InvariantReport invariants;

  Eigen::Map<const Eigen::VectorXd> QAt(int t) const {
    return Eigen::Map<const Eigen::VectorXd>(&q[static_cast<std::size_t>(t - 1) * k], k);
  }
  Eigen::Map<const Eigen::VectorXd> PAt(int t) const {
    return Eigen::Map<const Eigen::VectorXd>(&p[static_cast<std::size_t>(t - 1) * k], k);
  }
};

RunTrace RunEpisode(const PreparedGame& prepared, const EpisodeSpec& spec,
                    std::uint64_t seed);

// Runs seeds on up to `threads` workers; results are in seed order.
std::vector<RunTrace> RunSeeds(const PreparedGame& prepared, const EpisodeSpec& spec,
                               const std::vector<std::uint64_t>& seeds, int threads);

// Hindsight regret curve: curve_t = sum_{s<=t} (L(A_s, x_s) - L(a*, x_s)) with
// a* the best fixed action on the realized outcomes (lowest index on ties).
std::vector<double> PseudoRegret(const RunTrace& trace, const Game& game,
                                 int* hindsight_action = nullptr);

// Throws MissingPreCorruptionOutcomes for traces outside the corrupted regime.
double RealizedCorruption(const RunTrace& trace, const Game& game);

// sum_t H(q_t) <= Q(a*) log(e k_pi T / Q(a*)); returns rhs - lhs (or -lhs
// when Q(a*) = 0).
double Lemma5Margin(double entropy_sum, double q_astar, int k_pi, int horizon);

// Regret-bound shapes with every hidden constant set to 1.
enum class BoundFamily { kLocal, kGlobal };

struct BoundInputs {
  int horizon = 0;
  std::optional<double> delta_min;
  double corruption = 0.0;
};

struct BoundOverlay {
  double adversarial = 0.0;
  std::optional<double> stochastic;  // includes the corruption term
};

BoundOverlay TheoreticalBounds(BoundFamily family, int m, int k, int k_pi,
                               double c_g, const BoundInputs& inputs);

struct RunSummary {
  std::uint64_t seed = 0;
  int horizon = 0;
  double final_regret = 0.0;
  std::optional<double> expected_regret;
  int hindsight_action = 0;
  double q_astar = 0.0;
  double entropy_sum = 0.0;
  double lemma5_margin = 0.0;
  double realized_corruption = 0.0;
  double corruption_budget = 0.0;
  double wall_time_seconds = 0.0;
  InvariantReport invariants;
  std::vector<std::pair<int, double>> curve;  // subsampled
};

struct AggregateSummary {
  std::vector<RunSummary> runs;
  std::vector<int> checkpoints;
  std::vector<double> mean_curve;
  std::vector<double> std_curve;
  double mean_final = 0.0;
  double std_final = 0.0;
  std::optional<double> mean_expected;
  std::optional<double> std_expected;
  long invariant_violations = 0;
  double min_lemma5_margin = 0.0;
};

// Rounds kept in trace files: every t <= 1000, then every ceil(T/1000)-th,
// and always T.
std::vector<int> TraceCheckpoints(int horizon);

RunSummary SummarizeTrace(const RunTrace& trace);
// Throws EmptyInput.
AggregateSummary Summarize(const std::vector<RunTrace>& traces);

void WriteTraceCsv(const RunTrace& trace, const std::string& path);
std::string TraceCsv(const RunTrace& trace);
nlohmann::json SummaryToJson(const AggregateSummary& summary);
// Columns t, mean_regret, std_regret and, when given, one overlay value per
// checkpoint.
void WriteCurveCsv(const AggregateSummary& summary, const std::string& path,
                   const std::vector<double>& overlay = {});

const char* VersionStamp();

}  // namespace pmbobw
