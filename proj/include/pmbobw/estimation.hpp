#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pmbobw/game.hpp"
#include "pmbobw/geometry.hpp"

namespace pmbobw {

// Dense estimator G: (action, symbol) -> R^k.
class EstimatorTable {
 public:
  EstimatorTable() = default;
  EstimatorTable(int k, int num_symbols)
      : k_(k), num_symbols_(num_symbols),
        data_(static_cast<std::size_t>(k) * num_symbols * k, 0.0) {}

  int k() const { return k_; }
  int num_symbols() const { return num_symbols_; }

  double& at(int action, int symbol, int coord) {
    return data_[Offset(action, symbol) + coord];
  }
  double at(int action, int symbol, int coord) const {
    return data_[Offset(action, symbol) + coord];
  }
  Eigen::Map<Eigen::VectorXd> vec(int action, int symbol) {
    return Eigen::Map<Eigen::VectorXd>(&data_[Offset(action, symbol)], k_);
  }
  Eigen::Map<const Eigen::VectorXd> vec(int action, int symbol) const {
    return Eigen::Map<const Eigen::VectorXd>(&data_[Offset(action, symbol)], k_);
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }
  double MaxAbs() const;

 private:
  std::size_t Offset(int action, int symbol) const {
    return (static_cast<std::size_t>(action) * num_symbols_ + symbol) * k_;
  }

  int k_ = 0;
  int num_symbols_ = 0;
  std::vector<double> data_;
};

struct InTree {
  int root = -1;
  // child -> (parent, edge between them)
  std::map<int, std::pair<int, Edge>> parent;
  // paths[b] lists the edges from b up to the root; empty for the root and
  // for actions outside the Pareto set.
  std::vector<std::vector<Edge>> paths;
};

// Breadth-first tree rooted at the lowest-index Pareto action, visiting
// neighbors in ascending order. Throws DisconnectedNeighborGraph.
InTree BuildInTree(const GameGeometry& geom, int k);

struct GlobalEstimator {
  std::map<Edge, WitnessTable> w;
  InTree tree;
  EstimatorTable table;
  double c_g = 1.0;
};

// G(a, s)_b = sum over the path from b to the root of +-w_e(a, s), where
// w_e estimates L_a - L_b for e = (a, b), a < b, and an edge walked from its
// larger endpoint contributes with a minus sign. Throws MissingWitness, or
// InvalidWitness when a local-mode witness leaves its edge.
GlobalEstimator BuildGlobalEstimator(const Game& game, const GameGeometry& geom,
                                     const std::map<Edge, WitnessTable>& witnesses,
                                     ObservabilityMode mode);

// Largest violation of the loss-difference identity over outcomes and
// Pareto pairs.
double VerifyEstimator(const Game& game, const GameGeometry& geom,
                       const EstimatorTable& table);

// Importance-weighted estimate G(action, symbol) / p_action.
Eigen::VectorXd LossEstimate(const EstimatorTable& table, int action,
                             int symbol, double p_action);

// One line per (action, symbol): "a s G_0 ... G_{k-1}".
std::string DumpEstimator(const EstimatorTable& table);

}  // namespace pmbobw
