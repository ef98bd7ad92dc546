#include "pmbobw/geometry.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "pmbobw/error.hpp"
#include "pmbobw/lp.hpp"

namespace pmbobw {

const char* GameClassName(GameClassTag tag) {
  switch (tag) {
    case GameClassTag::kTrivial: return "trivial";
    case GameClassTag::kLocallyObservable: return "locally_observable";
    case GameClassTag::kGloballyObservable: return "globally_observable";
    case GameClassTag::kHopeless: return "hopeless";
  }
  return "unknown";
}

bool GameGeometry::IsPareto(int a) const {
  return std::binary_search(pareto.begin(), pareto.end(), a);
}

bool GameGeometry::NeighborGraphConnected() const {
  if (pareto.size() <= 1) return true;
  std::set<int> seen{pareto.front()};
  std::queue<int> frontier;
  frontier.push(pareto.front());
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (const Edge& e : neighbor_edges) {
      if (e.a != v && e.b != v) continue;
      const int w = e.Other(v);
      if (seen.insert(w).second) frontier.push(w);
    }
  }
  return seen.size() == pareto.size();
}

namespace {

void CheckLp(const LpResult& r, const char* what) {
  if (r.status == LpStatus::kIterationLimit || r.status == LpStatus::kUnbounded) {
    throw PmError(ErrorCode::kLpNumericalFailure,
                  std::string(what) + ": simplex did not converge");
  }
}

}  // namespace

int IntersectionDimension(const Game& game, const std::vector<int>& actions,
                          const GeometryOptions& options) {
  const int d = game.d();
  const int k = game.k();
  const LossMatrix& loss = game.loss();

  // Inequalities g^T u <= 0: loss differences, then -u_j <= 0.
  std::vector<Eigen::RowVectorXd> normals;
  for (int a : actions) {
    for (int b = 0; b < k; ++b) {
      if (b == a) continue;
      normals.push_back(loss.row(a) - loss.row(b));
    }
  }
  for (int j = 0; j < d; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(d);
    e(j) = -1.0;
    normals.push_back(e);
  }

  LinearProgram lp(d);
  for (const auto& g : normals) lp.AddLessEqual(g, 0.0);
  lp.AddEqual(Eigen::RowVectorXd::Ones(d), 1.0);

  const LpResult feasible = SolveLp(lp);
  CheckLp(feasible, "cell feasibility");
  if (feasible.status == LpStatus::kInfeasible) return -1;

  // An inequality is an implicit equality when its largest slack over the
  // polytope is zero.
  std::vector<Eigen::RowVectorXd> equalities;
  for (const auto& g : normals) {
    LinearProgram slack = lp;
    slack.objective = g.transpose();
    const LpResult r = SolveLp(slack);
    CheckLp(r, "implicit equality");
    if (r.status != LpStatus::kOptimal) {
      throw PmError(ErrorCode::kLpNumericalFailure,
                    "slack LP infeasible on a feasible cell");
    }
    if (-r.value <= options.slack_tolerance) {
      equalities.push_back(g.array() - g.mean());
    }
  }
  if (equalities.empty()) return d - 1;

  Eigen::MatrixXd normals_mat(static_cast<Eigen::Index>(equalities.size()), d);
  for (std::size_t i = 0; i < equalities.size(); ++i) {
    normals_mat.row(static_cast<Eigen::Index>(i)) = equalities[i];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normals_mat);
  qr.setThreshold(options.rank_threshold);
  return d - 1 - static_cast<int>(qr.rank());
}

int CellDimension(const Game& game, int action, const GeometryOptions& options) {
  return IntersectionDimension(game, {action}, options);
}

GameGeometry ParetoAndNeighbors(const Game& game,
                                const GeometryOptions& options) {
  GameGeometry geom;
  const int k = game.k();
  const int d = game.d();
  geom.d = d;

  std::vector<bool> grouped(k, false);
  for (int a = 0; a < k; ++a) {
    if (grouped[a]) continue;
    std::vector<int> group{a};
    for (int b = a + 1; b < k; ++b) {
      if (!grouped[b] && game.loss().row(a) == game.loss().row(b)) {
        group.push_back(b);
        grouped[b] = true;
      }
    }
    if (group.size() > 1) geom.duplicates.push_back(std::move(group));
  }

  geom.cell_dims.resize(k);
  for (int a = 0; a < k; ++a) {
    geom.cell_dims[a] = CellDimension(game, a, options);
    if (geom.cell_dims[a] == d - 1) {
      geom.pareto.push_back(a);
    } else if (geom.cell_dims[a] >= 0) {
      geom.degenerate.push_back(a);
    }
  }

  for (std::size_t i = 0; i < geom.pareto.size(); ++i) {
    for (std::size_t j = i + 1; j < geom.pareto.size(); ++j) {
      const int a = geom.pareto[i];
      const int b = geom.pareto[j];
      if (IntersectionDimension(game, {a, b}, options) == d - 2) {
        geom.neighbor_edges.push_back(Edge{a, b});
      }
    }
  }
  return geom;
}

double WitnessResidual(const Game& game, Edge edge, const WitnessTable& w) {
  double worst = 0.0;
  for (int x = 0; x < game.d(); ++x) {
    double sum = 0.0;
    for (int c = 0; c < game.k(); ++c) sum += w(c, game.symbol(c, x));
    const double target = game.loss(edge.a, x) - game.loss(edge.b, x);
    worst = std::max(worst, std::abs(sum - target));
  }
  return worst;
}

ObservabilityResult ObservabilityCheck(const Game& game, Edge edge,
                                       ObservabilityMode mode,
                                       const GeometryOptions& options) {
  const int k = game.k();
  const int d = game.d();
  std::vector<int> support;
  if (mode == ObservabilityMode::kLocal) {
    support = {edge.a, edge.b};
  } else {
    for (int c = 0; c < k; ++c) support.push_back(c);
  }

  // One unknown per (action, symbol that action can emit).
  std::vector<std::pair<int, int>> vars;
  std::map<std::pair<int, int>, int> index;
  for (int c : support) {
    std::set<int> symbols;
    for (int x = 0; x < d; ++x) symbols.insert(game.symbol(c, x));
    for (int s : symbols) {
      index[{c, s}] = static_cast<int>(vars.size());
      vars.emplace_back(c, s);
    }
  }
  const int n = static_cast<int>(vars.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(d, n);
  Eigen::VectorXd target(d);
  for (int x = 0; x < d; ++x) {
    for (int c : support) system(x, index.at({c, game.symbol(c, x)})) += 1.0;
    target(x) = game.loss(edge.a, x) - game.loss(edge.b, x);
  }

  ObservabilityResult result;
  const Eigen::VectorXd ls = system.completeOrthogonalDecomposition().solve(target);
  result.residual = (system * ls - target).cwiseAbs().maxCoeff();
  result.feasible = result.residual < options.residual_tolerance;
  if (!result.feasible) return result;

  // min t  s.t.  -t <= w_i <= t,  system w = target. Variables: w (free), t.
  LinearProgram lp(n + 1);
  lp.free_vars.assign(n + 1, true);
  lp.free_vars[n] = false;
  lp.objective(n) = 1.0;
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n + 1);
    row(i) = 1.0;
    row(n) = -1.0;
    lp.AddLessEqual(row, 0.0);
    row(i) = -1.0;
    lp.AddLessEqual(row, 0.0);
  }
  for (int x = 0; x < d; ++x) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n + 1);
    row.head(n) = system.row(x);
    lp.AddEqual(row, target(x));
  }
  const LpResult r = SolveLp(lp);
  if (r.status != LpStatus::kOptimal) {
    throw PmError(ErrorCode::kLpNumericalFailure,
                  "minimum-norm witness LP failed on a consistent system");
  }
  WitnessTable w = WitnessTable::Zero(k, game.num_symbols());
  for (int i = 0; i < n; ++i) w(vars[i].first, vars[i].second) = r.x(i);
  result.residual = WitnessResidual(game, edge, w);
  result.witness = std::move(w);
  return result;
}

GameClass Classify(const Game& game, const GeometryOptions& options) {
  GameClass cls;
  cls.geometry = ParetoAndNeighbors(game, options);
  const GameGeometry& geom = cls.geometry;

  std::set<int> distinct_pareto;
  for (int a : geom.pareto) {
    int rep = a;
    for (const auto& group : geom.duplicates) {
      if (std::find(group.begin(), group.end(), a) != group.end()) {
        rep = group.front();
      }
    }
    distinct_pareto.insert(rep);
  }
  if (distinct_pareto.size() <= 1) {
    cls.tag = GameClassTag::kTrivial;
    return cls;
  }

  bool local = true;
  bool global = true;
  for (const Edge& e : geom.neighbor_edges) {
    auto lr = ObservabilityCheck(game, e, ObservabilityMode::kLocal, options);
    if (lr.feasible) {
      cls.local_witnesses.emplace(e, std::move(*lr.witness));
    } else {
      local = false;
    }
    auto gr = ObservabilityCheck(game, e, ObservabilityMode::kGlobal, options);
    if (gr.feasible) {
      cls.global_witnesses.emplace(e, std::move(*gr.witness));
    } else {
      global = false;
      cls.unobservable_edges.push_back(e);
    }
  }
  if (!global) {
    cls.tag = GameClassTag::kHopeless;
    cls.local_witnesses.clear();
    cls.global_witnesses.clear();
  } else if (local) {
    cls.tag = GameClassTag::kLocallyObservable;
  } else {
    cls.tag = GameClassTag::kGloballyObservable;
    cls.local_witnesses.clear();
  }
  return cls;
}

nlohmann::json ClassReport(const Game& game, const GameClass& cls) {
  using nlohmann::json;
  const GameGeometry& geom = cls.geometry;
  json edges = json::array();
  for (const Edge& e : geom.neighbor_edges) {
    json entry{{"edge", {e.a, e.b}}};
    if (auto it = cls.local_witnesses.find(e); it != cls.local_witnesses.end()) {
      entry["local_w_inf_norm"] = it->second.cwiseAbs().maxCoeff();
    }
    if (auto it = cls.global_witnesses.find(e); it != cls.global_witnesses.end()) {
      entry["global_w_inf_norm"] = it->second.cwiseAbs().maxCoeff();
    }
    edges.push_back(std::move(entry));
  }
  json unobservable = json::array();
  for (const Edge& e : cls.unobservable_edges) unobservable.push_back({e.a, e.b});
  return json{{"game", game.name()},
              {"class", GameClassName(cls.tag)},
              {"pareto", geom.pareto},
              {"cell_dims", geom.cell_dims},
              {"duplicates", geom.duplicates},
              {"degenerate", geom.degenerate},
              {"edges", std::move(edges)},
              {"unobservable_edges", std::move(unobservable)}};
}

}  // namespace pmbobw
