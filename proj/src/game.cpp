#include "pmbobw/game.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "pmbobw/error.hpp"

namespace pmbobw {

using nlohmann::json;

Game ValidateGame(LossMatrix loss, FeedbackMatrix feedback, std::string name) {
  if (loss.rows() == 0 || loss.cols() == 0) {
    throw PmError(ErrorCode::kEmptyGame, "game has no actions or outcomes");
  }
  if (loss.rows() != feedback.rows() || loss.cols() != feedback.cols()) {
    throw PmError(ErrorCode::kDimensionMismatch,
                  "loss is " + std::to_string(loss.rows()) + "x" +
                      std::to_string(loss.cols()) + " but feedback is " +
                      std::to_string(feedback.rows()) + "x" +
                      std::to_string(feedback.cols()));
  }
  for (Eigen::Index a = 0; a < loss.rows(); ++a) {
    for (Eigen::Index x = 0; x < loss.cols(); ++x) {
      const double v = loss(a, x);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw PmError(ErrorCode::kLossOutOfRange,
                      "loss(" + std::to_string(a) + "," + std::to_string(x) +
                          ") = " + std::to_string(v) + " outside [0,1]");
      }
    }
  }
  std::set<int> seen;
  for (Eigen::Index a = 0; a < feedback.rows(); ++a) {
    for (Eigen::Index x = 0; x < feedback.cols(); ++x) {
      if (feedback(a, x) < 0) {
        throw PmError(ErrorCode::kInvalidFeedback, "negative symbol id");
      }
      seen.insert(feedback(a, x));
    }
  }
  const int num_symbols = *seen.rbegin() + 1;
  if (static_cast<int>(seen.size()) != num_symbols) {
    throw PmError(ErrorCode::kInvalidFeedback,
                  "symbol ids are not dense in 0.." +
                      std::to_string(num_symbols - 1));
  }

  Game game;
  game.loss_ = std::move(loss);
  game.feedback_ = std::move(feedback);
  game.num_symbols_ = num_symbols;
  game.name_ = std::move(name);
  return game;
}

SymbolStats ComputeSymbolStats(const Game& game) {
  SymbolStats stats;
  stats.per_row.reserve(game.k());
  for (int a = 0; a < game.k(); ++a) {
    std::set<int> row;
    for (int x = 0; x < game.d(); ++x) row.insert(game.symbol(a, x));
    stats.per_row.push_back(static_cast<int>(row.size()));
    stats.m = std::max(stats.m, stats.per_row.back());
  }
  return stats;
}

namespace {

Game MakeGame(std::string name, std::vector<std::vector<double>> loss,
              std::vector<std::vector<int>> feedback) {
  const auto k = static_cast<Eigen::Index>(loss.size());
  const auto d = static_cast<Eigen::Index>(loss.front().size());
  LossMatrix l(k, d);
  FeedbackMatrix f(k, d);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index x = 0; x < d; ++x) {
      l(a, x) = loss[a][x];
      f(a, x) = feedback[a][x];
    }
  }
  return ValidateGame(std::move(l), std::move(f), std::move(name));
}

}  // namespace

const std::vector<std::string>& CatalogNames() {
  static const std::vector<std::string> names = {
      "bandit2",      "bandit3",         "apple_tasting", "dynamic_pricing_small",
      "full_info_small", "hopeless_small", "trivial_small"};
  return names;
}

Game CatalogGame(std::string_view name) {
  // Bandit games: outcome x is the arm with zero loss; each arm reveals the
  // loss it suffered.
  if (name == "bandit2") {
    return MakeGame("bandit2", {{0, 1}, {1, 0}}, {{0, 1}, {1, 0}});
  }
  if (name == "bandit3") {
    return MakeGame("bandit3", {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}},
                    {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  }
  // Outcomes: good apple, rotten apple. Action 0 tastes (observes the
  // outcome, wastes good apples), action 1 sells blind.
  if (name == "apple_tasting") {
    return MakeGame("apple_tasting", {{1, 0}, {0, 1}}, {{0, 1}, {0, 0}});
  }
  // Posted prices 0 < 1 < 2 against valuations 0..2. A sale loses the
  // surplus (valuation - price)/4, a refusal costs 0.75. Feedback is sold (1)
  // or not sold (0).
  if (name == "dynamic_pricing_small") {
    return MakeGame("dynamic_pricing_small",
                    {{0, 0.25, 0.5}, {0.75, 0, 0.25}, {0.75, 0.75, 0}},
                    {{1, 1, 1}, {0, 1, 1}, {0, 0, 1}});
  }
  if (name == "full_info_small") {
    return MakeGame("full_info_small",
                    {{0, 0.5, 1}, {0.5, 0, 0.5}, {1, 0.5, 0}},
                    {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}});
  }
  // Matching pennies with no information at all.
  if (name == "hopeless_small") {
    return MakeGame("hopeless_small", {{0, 1}, {1, 0}}, {{0, 0}, {0, 0}});
  }
  // Action 0 dominates both others.
  if (name == "trivial_small") {
    return MakeGame("trivial_small", {{0, 0.5}, {0.5, 1}, {1, 0.75}},
                    {{0, 1}, {0, 0}, {1, 1}});
  }
  throw PmError(ErrorCode::kUnknownCatalogName, std::string(name));
}

json GameToJson(const Game& game) {
  json loss = json::array();
  json feedback = json::array();
  for (int a = 0; a < game.k(); ++a) {
    json lrow = json::array();
    json frow = json::array();
    for (int x = 0; x < game.d(); ++x) {
      lrow.push_back(game.loss(a, x));
      frow.push_back(game.symbol(a, x));
    }
    loss.push_back(std::move(lrow));
    feedback.push_back(std::move(frow));
  }
  return json{{"name", game.name()},
              {"k", game.k()},
              {"d", game.d()},
              {"loss", std::move(loss)},
              {"feedback", std::move(feedback)}};
}

namespace {

template <typename Matrix, typename Scalar>
Matrix ReadMatrix(const json& arr, int k, int d, const char* field) {
  if (!arr.is_array()) {
    throw PmError(ErrorCode::kInvalidConfig,
                  std::string("field '") + field + "' must be an array");
  }
  Matrix out(k, d);
  const bool nested = !arr.empty() && arr.front().is_array();
  if (nested) {
    if (static_cast<int>(arr.size()) != k) {
      throw PmError(ErrorCode::kDimensionMismatch,
                    std::string(field) + " has " + std::to_string(arr.size()) +
                        " rows, expected " + std::to_string(k));
    }
    for (int a = 0; a < k; ++a) {
      if (!arr[a].is_array() || static_cast<int>(arr[a].size()) != d) {
        throw PmError(ErrorCode::kDimensionMismatch,
                      std::string(field) + " row " + std::to_string(a) +
                          " does not have " + std::to_string(d) + " entries");
      }
      for (int x = 0; x < d; ++x) out(a, x) = arr[a][x].get<Scalar>();
    }
  } else {
    if (static_cast<int>(arr.size()) != k * d) {
      throw PmError(ErrorCode::kDimensionMismatch,
                    std::string(field) + " has " + std::to_string(arr.size()) +
                        " entries, expected k*d = " + std::to_string(k * d));
    }
    for (int a = 0; a < k; ++a) {
      for (int x = 0; x < d; ++x) out(a, x) = arr[a * d + x].get<Scalar>();
    }
  }
  return out;
}

}  // namespace

Game GameFromJson(const json& doc) {
  static const std::set<std::string> known = {"name", "k", "d", "loss",
                                              "feedback"};
  if (!doc.is_object()) {
    throw PmError(ErrorCode::kInvalidConfig, "game document must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) {
      throw PmError(ErrorCode::kInvalidConfig, "unknown game key '" + key + "'");
    }
  }
  for (const char* key : {"k", "d", "loss", "feedback"}) {
    if (!doc.contains(key)) {
      throw PmError(ErrorCode::kInvalidConfig,
                    std::string("game document is missing '") + key + "'");
    }
  }
  const int k = doc.at("k").get<int>();
  const int d = doc.at("d").get<int>();
  if (k <= 0 || d <= 0) {
    throw PmError(ErrorCode::kEmptyGame, "k and d must be positive");
  }
  try {
    auto loss = ReadMatrix<LossMatrix, double>(doc.at("loss"), k, d, "loss");
    auto feedback =
        ReadMatrix<FeedbackMatrix, int>(doc.at("feedback"), k, d, "feedback");
    return ValidateGame(std::move(loss), std::move(feedback),
                        doc.value("name", std::string()));
  } catch (const json::exception& e) {
    throw PmError(ErrorCode::kInvalidConfig, e.what());
  }
}

Game LoadGameFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PmError(ErrorCode::kIoError, "cannot open game file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw PmError(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
  return GameFromJson(doc);
}

void SaveGameFile(const Game& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PmError(ErrorCode::kIoError, "cannot write " + path);
  out << GameToJson(game).dump(2) << '\n';
}

Game ResolveGame(const std::string& ref) {
  if (std::filesystem::exists(ref)) return LoadGameFile(ref);
  for (const auto& name : CatalogNames()) {
    if (name == ref) return CatalogGame(name);
  }
  throw PmError(ErrorCode::kIoError,
                "game file not found and not a catalog name: " + ref);
}

}  // namespace pmbobw
