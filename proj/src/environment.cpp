#include "pmbobw/environment.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "pmbobw/error.hpp"
#include "pmbobw/lp.hpp"
#include "pmbobw/rng.hpp"

namespace pmbobw {

using nlohmann::json;

GapProfile ComputeGapProfile(const Game& game, const Eigen::VectorXd& nu) {
  if (nu.size() != game.d()) {
    throw PmError(ErrorCode::kDimensionMismatch, "nu must have length d");
  }
  const Eigen::VectorXd expected = game.loss() * nu;
  GapProfile profile;
  for (int a = 1; a < game.k(); ++a) {
    if (expected(a) < expected(profile.a_star)) profile.a_star = a;
  }
  profile.gaps = expected.array() - expected(profile.a_star);
  profile.delta_min = std::numeric_limits<double>::infinity();
  for (int a = 0; a < game.k(); ++a) {
    if (a == profile.a_star) continue;
    if (profile.gaps(a) <= 1e-12) profile.unique = false;
    profile.delta_min = std::min(profile.delta_min, profile.gaps(a));
  }
  profile.gaps(profile.a_star) = 0.0;
  return profile;
}

Eigen::VectorXd CellInteriorPoint(const Game& game, int action) {
  const int d = game.d();
  // Variables u (>= 0) and s (free): maximize s.
  LinearProgram lp(d + 1);
  lp.free_vars.assign(d + 1, false);
  lp.free_vars[d] = true;
  lp.objective(d) = -1.0;
  for (int b = 0; b < game.k(); ++b) {
    if (game.loss().row(b) == game.loss().row(action)) continue;
    Eigen::RowVectorXd row(d + 1);
    row.head(d) = game.loss().row(action) - game.loss().row(b);
    row(d) = 1.0;
    lp.AddLessEqual(row, 0.0);
  }
  for (int j = 0; j < d; ++j) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(d + 1);
    row(j) = -1.0;
    row(d) = 1.0;
    lp.AddLessEqual(row, 0.0);
  }
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Ones(d + 1);
  sum(d) = 0.0;
  lp.AddEqual(sum, 1.0);
  const LpResult r = SolveLp(lp);
  if (r.status != LpStatus::kOptimal) {
    throw PmError(ErrorCode::kLpNumericalFailure,
                  "cell of action " + std::to_string(action) + " is empty");
  }
  Eigen::VectorXd u = r.x.head(d).cwiseMax(0.0);
  return u / u.sum();
}

namespace {

template <typename Enum>
Enum ParseEnum(const json& value, std::initializer_list<std::pair<const char*, Enum>> table,
               const char* field) {
  const std::string s = value.get<std::string>();
  for (const auto& [name, e] : table) {
    if (s == name) return e;
  }
  throw PmError(ErrorCode::kInvalidConfig,
                std::string("unknown value '") + s + "' for " + field);
}

Eigen::VectorXd ParseDistribution(const json& value, const Game& game) {
  std::vector<double> v = value.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != game.d()) {
    throw PmError(ErrorCode::kDimensionMismatch,
                  "nu has " + std::to_string(v.size()) + " entries, d = " +
                      std::to_string(game.d()));
  }
  Eigen::VectorXd nu = Eigen::Map<Eigen::VectorXd>(v.data(), game.d());
  if (nu.minCoeff() < 0.0 || std::abs(nu.sum() - 1.0) > 1e-9) {
    throw PmError(ErrorCode::kInvalidConfig, "nu must be a probability vector");
  }
  return nu;
}

const std::initializer_list<std::pair<const char*, RegimeKind>> kRegimes = {
    {"stochastic", RegimeKind::kStochastic},
    {"adversarial", RegimeKind::kAdversarial},
    {"corrupted", RegimeKind::kCorrupted},
    {"stochastically_constrained", RegimeKind::kStochasticallyConstrained}};
const std::initializer_list<std::pair<const char*, AdversaryKind>> kAdversaries = {
    {"periodic", AdversaryKind::kPeriodic},
    {"cell_switching", AdversaryKind::kCellSwitching},
    {"best_response", AdversaryKind::kBestResponse}};
const std::initializer_list<std::pair<const char*, CorruptionPolicy>> kPolicies = {
    {"front_loaded", CorruptionPolicy::kFrontLoaded},
    {"random_time", CorruptionPolicy::kRandomTime},
    {"targeted", CorruptionPolicy::kTargeted}};

template <typename Enum>
const char* EnumName(Enum e, std::initializer_list<std::pair<const char*, Enum>> table) {
  for (const auto& [name, v] : table) {
    if (v == e) return name;
  }
  return "?";
}

}  // namespace

EnvironmentSpec EnvironmentSpecFromJson(const json& doc, const Game& game) {
  if (!doc.is_object() || !doc.contains("type")) {
    throw PmError(ErrorCode::kInvalidConfig, "environment needs a 'type'");
  }
  EnvironmentSpec spec;
  try {
    spec.kind = ParseEnum(doc.at("type"), kRegimes, "environment.type");
    std::set<std::string> allowed = {"type"};
    switch (spec.kind) {
      case RegimeKind::kStochastic:
        allowed.insert("nu");
        break;
      case RegimeKind::kAdversarial:
        allowed.insert({"generator", "sequence", "edge"});
        break;
      case RegimeKind::kCorrupted:
        allowed.insert({"nu", "policy", "budget", "rate"});
        break;
      case RegimeKind::kStochasticallyConstrained:
        allowed.insert({"nu", "amplitude", "period"});
        break;
    }
    for (const auto& [key, value] : doc.items()) {
      if (!allowed.contains(key)) {
        throw PmError(ErrorCode::kInvalidConfig,
                      "unknown environment key '" + key + "'");
      }
    }
    if (spec.has_distribution()) {
      if (!doc.contains("nu")) {
        throw PmError(ErrorCode::kInvalidConfig, "environment needs 'nu'");
      }
      spec.nu = ParseDistribution(doc.at("nu"), game);
    }
    if (spec.kind == RegimeKind::kAdversarial) {
      spec.adversary = ParseEnum(doc.value("generator", json("cell_switching")),
                                 kAdversaries, "environment.generator");
      if (spec.adversary == AdversaryKind::kPeriodic) {
        spec.sequence = doc.at("sequence").get<std::vector<int>>();
        if (spec.sequence.empty()) {
          throw PmError(ErrorCode::kInvalidConfig, "empty periodic sequence");
        }
        for (int x : spec.sequence) {
          if (x < 0 || x >= game.d()) {
            throw PmError(ErrorCode::kInvalidConfig, "sequence outcome out of range");
          }
        }
      }
      if (doc.contains("edge")) {
        auto e = doc.at("edge").get<std::vector<int>>();
        if (e.size() != 2) throw PmError(ErrorCode::kInvalidConfig, "edge needs two actions");
        spec.switch_edge = Edge::Make(e[0], e[1]);
      }
    }
    if (spec.kind == RegimeKind::kCorrupted) {
      spec.policy = ParseEnum(doc.value("policy", json("front_loaded")), kPolicies,
                              "environment.policy");
      spec.budget = doc.value("budget", 0.0);
      spec.corruption_rate = doc.value("rate", -1.0);
      if (spec.budget < 0.0) {
        throw PmError(ErrorCode::kInvalidConfig, "corruption budget must be >= 0");
      }
    }
    if (spec.kind == RegimeKind::kStochasticallyConstrained) {
      spec.amplitude = doc.value("amplitude", 0.5);
      spec.period = doc.value("period", 1000);
      if (spec.amplitude < 0.0 || spec.amplitude > 1.0 || spec.period <= 0) {
        throw PmError(ErrorCode::kInvalidConfig, "bad oscillation parameters");
      }
    }
  } catch (const json::exception& e) {
    throw PmError(ErrorCode::kInvalidConfig, std::string("environment: ") + e.what());
  }
  return spec;
}

json EnvironmentSpecToJson(const EnvironmentSpec& spec) {
  json doc{{"type", EnumName(spec.kind, kRegimes)}};
  if (spec.has_distribution()) {
    doc["nu"] = std::vector<double>(spec.nu.data(), spec.nu.data() + spec.nu.size());
  }
  if (spec.kind == RegimeKind::kAdversarial) {
    doc["generator"] = EnumName(spec.adversary, kAdversaries);
    if (spec.adversary == AdversaryKind::kPeriodic) doc["sequence"] = spec.sequence;
    if (spec.switch_edge) doc["edge"] = {spec.switch_edge->a, spec.switch_edge->b};
  }
  if (spec.kind == RegimeKind::kCorrupted) {
    doc["policy"] = EnumName(spec.policy, kPolicies);
    doc["budget"] = spec.budget;
    if (spec.corruption_rate >= 0.0) doc["rate"] = spec.corruption_rate;
  }
  if (spec.kind == RegimeKind::kStochasticallyConstrained) {
    doc["amplitude"] = spec.amplitude;
    doc["period"] = spec.period;
  }
  return doc;
}

double CorruptionCharge(const Game& game, int outcome, int outcome_pre) {
  return (game.loss().col(outcome) - game.loss().col(outcome_pre))
      .cwiseAbs()
      .maxCoeff();
}

double RealizedCorruption(const Game& game, std::span<const int> outcomes,
                          std::span<const int> outcomes_pre) {
  if (outcomes.size() != outcomes_pre.size()) {
    throw PmError(ErrorCode::kMissingPreCorruptionOutcomes,
                  "pre-corruption outcomes do not cover every round");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    total += CorruptionCharge(game, outcomes[t], outcomes_pre[t]);
  }
  return total;
}

Environment::Environment(const Game& game, const GameGeometry& geom,
                         EnvironmentSpec spec, std::uint64_t seed, int horizon)
    : game_(&game), spec_(std::move(spec)), seed_(seed), horizon_(horizon) {
  if (spec_.kind == RegimeKind::kAdversarial &&
      spec_.adversary == AdversaryKind::kCellSwitching) {
    Edge edge;
    if (spec_.switch_edge) {
      edge = *spec_.switch_edge;
    } else {
      if (geom.neighbor_edges.empty()) {
        throw PmError(ErrorCode::kInvalidConfig,
                      "cell switching needs at least one neighbor edge");
      }
      // Prefer an edge that needs global information.
      edge = geom.neighbor_edges.front();
      for (const Edge& e : geom.neighbor_edges) {
        if (!ObservabilityCheck(game, e, ObservabilityMode::kLocal).feasible) {
          edge = e;
          break;
        }
      }
      spec_.switch_edge = edge;
    }
    switch_points_[0] = CellInteriorPoint(game, edge.a);
    switch_points_[1] = CellInteriorPoint(game, edge.b);
    phase_length_ = std::max(1, (horizon + 3) / 4);
  }
  if (spec_.kind == RegimeKind::kCorrupted) {
    const GapProfile profile = ComputeGapProfile(game, spec_.nu);
    a_star_ = profile.a_star;
    for (int a = 0; a < game.k(); ++a) {
      if (a == a_star_) continue;
      if (runner_up_ < 0 || profile.gaps(a) < profile.gaps(runner_up_)) runner_up_ = a;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < game.d(); ++x) {
      double score;
      if (spec_.policy == CorruptionPolicy::kTargeted && runner_up_ >= 0) {
        score = game.loss(a_star_, x) - game.loss(runner_up_, x);
      } else {
        double others = std::numeric_limits<double>::infinity();
        for (int b = 0; b < game.k(); ++b) {
          if (b != a_star_) others = std::min(others, game.loss(b, x));
        }
        score = game.loss(a_star_, x) - others;
      }
      if (score > best) {
        best = score;
        corruption_target_ = x;
      }
    }
    if (spec_.corruption_rate < 0.0) {
      spec_.corruption_rate = std::min(1.0, 2.0 * spec_.budget / std::max(1, horizon));
    }
  }
  if (spec_.kind == RegimeKind::kStochasticallyConstrained) {
    const GapProfile base = ComputeGapProfile(game, spec_.nu);
    interior_star_ = CellInteriorPoint(game, base.a_star);
    const Eigen::VectorXd star_losses = game.loss() * interior_star_;
    const Eigen::VectorXd star_gaps =
        star_losses.array() - star_losses(base.a_star);
    constrained_gaps_ = base.gaps.cwiseMin(star_gaps);
  }
}

int Environment::SampleFrom(const Eigen::VectorXd& nu, int t) const {
  return SampleIndex(nu, CounterUniform(seed_, RngStream::kOutcome,
                                        static_cast<std::uint64_t>(t)));
}

Eigen::VectorXd Environment::DistributionAt(int t) const {
  switch (spec_.kind) {
    case RegimeKind::kStochastic:
    case RegimeKind::kCorrupted:
      return spec_.nu;
    case RegimeKind::kStochasticallyConstrained: {
      const double phase = 2.0 * std::numbers::pi * t / spec_.period;
      const double lambda = spec_.amplitude * 0.5 * (1.0 + std::sin(phase));
      return (1.0 - lambda) * spec_.nu + lambda * interior_star_;
    }
    case RegimeKind::kAdversarial:
      if (spec_.adversary == AdversaryKind::kCellSwitching) {
        return switch_points_[((t - 1) / phase_length_) % 2];
      }
      break;
  }
  throw PmError(ErrorCode::kInvalidArgument, "regime has no outcome distribution");
}

int Environment::Corrupt(int t, int pre) {
  if (corruption_stopped_ || pre == corruption_target_) return pre;
  switch (spec_.policy) {
    case CorruptionPolicy::kFrontLoaded:
      break;
    case CorruptionPolicy::kRandomTime:
      if (CounterUniform(seed_, RngStream::kCorruption, static_cast<std::uint64_t>(t)) >=
          spec_.corruption_rate) {
        return pre;
      }
      break;
    case CorruptionPolicy::kTargeted:
      if (runner_up_ < 0 ||
          game_->loss(a_star_, pre) >= game_->loss(runner_up_, pre)) {
        return pre;
      }
      break;
  }
  const double charge = CorruptionCharge(*game_, corruption_target_, pre);
  if (charge == 0.0) return pre;
  if (realized_corruption_ + charge > spec_.budget + 1e-12) {
    corruption_stopped_ = true;
    return pre;
  }
  realized_corruption_ += charge;
  return corruption_target_;
}

OutcomeDraw Environment::Draw(int t, std::span<const int> past_actions) {
  OutcomeDraw draw;
  switch (spec_.kind) {
    case RegimeKind::kStochastic:
    case RegimeKind::kStochasticallyConstrained:
      draw.outcome = SampleFrom(DistributionAt(t), t);
      draw.outcome_pre = draw.outcome;
      break;
    case RegimeKind::kCorrupted:
      draw.outcome_pre = SampleFrom(spec_.nu, t);
      draw.outcome = Corrupt(t, draw.outcome_pre);
      break;
    case RegimeKind::kAdversarial:
      switch (spec_.adversary) {
        case AdversaryKind::kPeriodic:
          draw.outcome = spec_.sequence[(t - 1) % spec_.sequence.size()];
          break;
        case AdversaryKind::kCellSwitching:
          draw.outcome = SampleFrom(DistributionAt(t), t);
          break;
        case AdversaryKind::kBestResponse: {
          if (action_counts_.size() == 0) action_counts_ = Eigen::VectorXd::Zero(game_->k());
          for (; counted_ < past_actions.size(); ++counted_) {
            action_counts_(past_actions[counted_]) += 1.0;
          }
          Eigen::VectorXd freq = Eigen::VectorXd::Constant(game_->k(), 1.0 / game_->k());
          if (counted_ > 0) freq = action_counts_ / static_cast<double>(counted_);
          const Eigen::VectorXd expected = game_->loss().transpose() * freq;
          Eigen::Index best = 0;
          expected.maxCoeff(&best);
          draw.outcome = static_cast<int>(best);
          break;
        }
      }
      draw.outcome_pre = draw.outcome;
      break;
  }
  return draw;
}

}  // namespace pmbobw
