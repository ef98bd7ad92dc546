#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "pmbobw/game.hpp"

namespace pmbobw {

// Unordered action pair stored with a < b.
struct Edge {
  int a = 0;
  int b = 0;

  static Edge Make(int x, int y) { return x < y ? Edge{x, y} : Edge{y, x}; }
  int Other(int v) const { return v == a ? b : a; }
  auto operator<=>(const Edge&) const = default;
};

// Coefficients w(c, sigma), k rows by num_symbols columns.
using WitnessTable = Eigen::MatrixXd;

struct GeometryOptions {
  double slack_tolerance = 1e-7;
  double rank_threshold = 1e-9;
  double residual_tolerance = 1e-7;
};

struct GameGeometry {
  std::vector<int> cell_dims;        // -1 for empty cells
  std::vector<int> pareto;           // ascending
  std::vector<std::vector<int>> duplicates;
  std::vector<int> degenerate;
  std::vector<Edge> neighbor_edges;  // sorted
  int d = 0;

  int k_pi() const { return static_cast<int>(pareto.size()); }
  bool IsPareto(int a) const;
  bool NeighborGraphConnected() const;
};

enum class ObservabilityMode { kLocal, kGlobal };

struct ObservabilityResult {
  bool feasible = false;
  double residual = 0.0;
  std::optional<WitnessTable> witness;
};

enum class GameClassTag { kTrivial, kLocallyObservable, kGloballyObservable, kHopeless };

const char* GameClassName(GameClassTag tag);

struct GameClass {
  GameClassTag tag = GameClassTag::kHopeless;
  GameGeometry geometry;
  // Filled for every edge when the game is locally observable.
  std::map<Edge, WitnessTable> local_witnesses;
  // Filled for every edge when the game is globally observable.
  std::map<Edge, WitnessTable> global_witnesses;
  std::vector<Edge> unobservable_edges;
};

// Dimension of the affine hull of the intersection of the cells of
// `actions` (a single action gives its cell). -1 when empty.
int IntersectionDimension(const Game& game, const std::vector<int>& actions,
                          const GeometryOptions& options = {});
int CellDimension(const Game& game, int action,
                  const GeometryOptions& options = {});

GameGeometry ParetoAndNeighbors(const Game& game,
                                const GeometryOptions& options = {});

// Solves sum_c w(c, Phi(c,x)) = L(a,x) - L(b,x) for the edge's (a, b) with
// a < b. The witness is the minimum infinity-norm solution.
ObservabilityResult ObservabilityCheck(const Game& game, Edge edge,
                                       ObservabilityMode mode,
                                       const GeometryOptions& options = {});

// Max over outcomes of |sum_c w(c, Phi(c,x)) - (L(a,x) - L(b,x))|.
double WitnessResidual(const Game& game, Edge edge, const WitnessTable& w);

GameClass Classify(const Game& game, const GeometryOptions& options = {});

nlohmann::json ClassReport(const Game& game, const GameClass& cls);

}  // namespace pmbobw
