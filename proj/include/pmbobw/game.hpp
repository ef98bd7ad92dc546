#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace pmbobw {

using LossMatrix = Eigen::MatrixXd;
using FeedbackMatrix = Eigen::MatrixXi;

// A finite partial monitoring game. Row a of `loss` is the loss vector of
// action a; `feedback(a, x)` is the symbol id observed when a meets outcome x.
// Symbol ids are dense in [0, num_symbols). Immutable once constructed.
class Game {
 public:
  int k() const { return static_cast<int>(loss_.rows()); }
  int d() const { return static_cast<int>(loss_.cols()); }
  int num_symbols() const { return num_symbols_; }
  const LossMatrix& loss() const { return loss_; }
  const FeedbackMatrix& feedback() const { return feedback_; }
  const std::string& name() const { return name_; }

  double loss(int action, int outcome) const { return loss_(action, outcome); }
  int symbol(int action, int outcome) const {
    return feedback_(action, outcome);
  }

  friend Game ValidateGame(LossMatrix loss, FeedbackMatrix feedback,
                           std::string name);

 private:
  Game() = default;

  LossMatrix loss_;
  FeedbackMatrix feedback_;
  int num_symbols_ = 0;
  std::string name_;
};

// Throws PmError (DimensionMismatch, LossOutOfRange, EmptyGame,
// InvalidFeedback).
Game ValidateGame(LossMatrix loss, FeedbackMatrix feedback,
                  std::string name = "");

struct SymbolStats {
  std::vector<int> per_row;
  int m = 0;
};

SymbolStats ComputeSymbolStats(const Game& game);

const std::vector<std::string>& CatalogNames();
Game CatalogGame(std::string_view name);

// Game documents: {"name", "k", "d", "loss", "feedback"}; loss and feedback
// are row-major, either nested rows or one flat array of length k*d.
nlohmann::json GameToJson(const Game& game);
Game GameFromJson(const nlohmann::json& doc);
Game LoadGameFile(const std::string& path);
void SaveGameFile(const Game& game, const std::string& path);

// Accepts a catalog name or a path to a game document.
Game ResolveGame(const std::string& ref);

}  // namespace pmbobw
