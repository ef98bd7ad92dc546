#include "pmbobw/estimation.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <sstream>

#include "pmbobw/error.hpp"

namespace pmbobw {

double EstimatorTable::MaxAbs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

InTree BuildInTree(const GameGeometry& geom, int k) {
  InTree tree;
  tree.paths.assign(k, {});
  if (geom.pareto.empty()) return tree;
  tree.root = geom.pareto.front();

  std::vector<bool> seen(k, false);
  seen[tree.root] = true;
  std::queue<int> frontier;
  frontier.push(tree.root);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : geom.pareto) {
      if (seen[w]) continue;
      const Edge e = Edge::Make(v, w);
      if (!std::binary_search(geom.neighbor_edges.begin(),
                              geom.neighbor_edges.end(), e)) {
        continue;
      }
      seen[w] = true;
      tree.parent[w] = {v, e};
      tree.paths[w] = tree.paths[v];
      tree.paths[w].insert(tree.paths[w].begin(), e);
      frontier.push(w);
    }
  }
  for (int a : geom.pareto) {
    if (!seen[a]) {
      throw PmError(ErrorCode::kDisconnectedNeighborGraph,
                    "Pareto action " + std::to_string(a) +
                        " is not reachable from the root");
    }
  }
  return tree;
}

GlobalEstimator BuildGlobalEstimator(const Game& game, const GameGeometry& geom,
                                     const std::map<Edge, WitnessTable>& witnesses,
                                     ObservabilityMode mode) {
  const int k = game.k();
  const int num_symbols = game.num_symbols();
  GlobalEstimator est;
  est.tree = BuildInTree(geom, k);

  for (int b : geom.pareto) {
    for (const Edge& e : est.tree.paths[b]) {
      auto it = witnesses.find(e);
      if (it == witnesses.end()) {
        throw PmError(ErrorCode::kMissingWitness,
                      "no witness for edge {" + std::to_string(e.a) + "," +
                          std::to_string(e.b) + "}");
      }
      if (mode == ObservabilityMode::kLocal) {
        for (int c = 0; c < k; ++c) {
          if (c == e.a || c == e.b) continue;
          if (it->second.row(c).cwiseAbs().maxCoeff() != 0.0) {
            throw PmError(ErrorCode::kInvalidWitness,
                          "local witness has support outside its edge");
          }
        }
      }
      est.w.emplace(e, it->second);
    }
  }

  est.table = EstimatorTable(k, num_symbols);
  for (int b : geom.pareto) {
    int node = b;
    for (const Edge& e : est.tree.paths[b]) {
      const double sign = node == e.a ? 1.0 : -1.0;
      const WitnessTable& w = est.w.at(e);
      for (int a = 0; a < k; ++a) {
        for (int s = 0; s < num_symbols; ++s) {
          est.table.at(a, s, b) += sign * w(a, s);
        }
      }
      node = e.Other(node);
    }
  }
  est.c_g = std::max(1.0, k * est.table.MaxAbs());
  return est;
}

double VerifyEstimator(const Game& game, const GameGeometry& geom,
                       const EstimatorTable& table) {
  double worst = 0.0;
  for (int x = 0; x < game.d(); ++x) {
    Eigen::VectorXd total = Eigen::VectorXd::Zero(game.k());
    for (int a = 0; a < game.k(); ++a) total += table.vec(a, game.symbol(a, x));
    for (int b : geom.pareto) {
      for (int c : geom.pareto) {
        const double lhs = total(b) - total(c);
        const double rhs = game.loss(b, x) - game.loss(c, x);
        worst = std::max(worst, std::abs(lhs - rhs));
      }
    }
  }
  return worst;
}

Eigen::VectorXd LossEstimate(const EstimatorTable& table, int action,
                             int symbol, double p_action) {
  if (!(p_action > 0.0)) {
    throw PmError(ErrorCode::kZeroProbabilityAction,
                  "action " + std::to_string(action) + " has probability " +
                      std::to_string(p_action));
  }
  return table.vec(action, symbol) / p_action;
}

std::string DumpEstimator(const EstimatorTable& table) {
  std::ostringstream out;
  char buf[64];
  for (int a = 0; a < table.k(); ++a) {
    for (int s = 0; s < table.num_symbols(); ++s) {
      out << a << ' ' << s;
      for (int c = 0; c < table.k(); ++c) {
        std::snprintf(buf, sizeof(buf), " %.17g", table.at(a, s, c));
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace pmbobw
