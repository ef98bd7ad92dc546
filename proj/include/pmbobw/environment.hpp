#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pmbobw/game.hpp"
#include "pmbobw/geometry.hpp"

namespace pmbobw {

struct GapProfile {
  int a_star = 0;
  bool unique = true;
  Eigen::VectorXd gaps;
  double delta_min = 0.0;  // +inf when every action is optimal
};

// a* = argmin_a l_a^T nu (lowest index on ties), gaps relative to a*.
GapProfile ComputeGapProfile(const Game& game, const Eigen::VectorXd& nu);

// A point of the cell of `action` that maximizes the smallest slack of its
// defining inequalities; interior whenever the cell is full-dimensional.
Eigen::VectorXd CellInteriorPoint(const Game& game, int action);

enum class RegimeKind { kStochastic, kAdversarial, kCorrupted, kStochasticallyConstrained };
enum class AdversaryKind { kPeriodic, kCellSwitching, kBestResponse };
enum class CorruptionPolicy { kFrontLoaded, kRandomTime, kTargeted };

struct EnvironmentSpec {
  RegimeKind kind = RegimeKind::kStochastic;
  Eigen::VectorXd nu;               // stochastic, corrupted, constrained
  AdversaryKind adversary = AdversaryKind::kPeriodic;
  std::vector<int> sequence;        // periodic adversary
  std::optional<Edge> switch_edge;  // cell switching; default picked from the game
  CorruptionPolicy policy = CorruptionPolicy::kFrontLoaded;
  double budget = 0.0;
  double corruption_rate = -1.0;    // random-time policy; default 2 budget / T
  double amplitude = 0.5;           // stochastically constrained
  int period = 1000;

  bool has_distribution() const { return kind != RegimeKind::kAdversarial; }
};

// {"type": "stochastic" | "adversarial" | "corrupted" |
//  "stochastically_constrained", ...}. Unknown keys are rejected.
EnvironmentSpec EnvironmentSpecFromJson(const nlohmann::json& doc, const Game& game);
nlohmann::json EnvironmentSpecToJson(const EnvironmentSpec& spec);

struct OutcomeDraw {
  int outcome = 0;
  int outcome_pre = 0;  // before corruption; equals outcome elsewhere
};

// Per-episode outcome generator. Draws for round t only see actions of
// rounds 1..t-1.
class Environment {
 public:
  Environment(const Game& game, const GameGeometry& geom, EnvironmentSpec spec,
              std::uint64_t seed, int horizon);

  OutcomeDraw Draw(int t, std::span<const int> past_actions);

  const EnvironmentSpec& spec() const { return spec_; }
  double realized_corruption() const { return realized_corruption_; }
  double budget() const { return spec_.budget; }
  // Outcome distribution of round t where the regime has one.
  Eigen::VectorXd DistributionAt(int t) const;
  // Gap lower bounds of the stochastically constrained regime.
  const Eigen::VectorXd& constrained_gaps() const { return constrained_gaps_; }

 private:
  int SampleFrom(const Eigen::VectorXd& nu, int t) const;
  int Corrupt(int t, int pre);

  const Game* game_;
  EnvironmentSpec spec_;
  std::uint64_t seed_;
  int horizon_;
  double realized_corruption_ = 0.0;
  bool corruption_stopped_ = false;
  int corruption_target_ = 0;
  int a_star_ = 0;
  int runner_up_ = -1;
  Eigen::VectorXd switch_points_[2];
  int phase_length_ = 1;
  Eigen::VectorXd interior_star_;
  Eigen::VectorXd constrained_gaps_;
  Eigen::VectorXd action_counts_;
  std::size_t counted_ = 0;
};

double CorruptionCharge(const Game& game, int outcome, int outcome_pre);

// Realized sum of ||L e_x - L e_x'||_inf over rounds.
double RealizedCorruption(const Game& game, std::span<const int> outcomes,
                          std::span<const int> outcomes_pre);

}  // namespace pmbobw
