#include "pmbobw/exobopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmbobw/error.hpp"
#include "pmbobw/ftrl.hpp"

namespace pmbobw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbFloor = 1e-12;

// p * xi(g / p), extended to p = 0 by its limit.
double Perspective(double p, double g) {
  if (p <= 0.0) {
    if (g == 0.0) return 0.0;
    return g > 0.0 ? g : kInf;
  }
  return p * Xi(g / p);
}

struct OutcomeTerms {
  double value = 0.0;
  int bias_argmax = -1;
};

OutcomeTerms EvalOutcome(const ExoProblem& problem, const Eigen::VectorXd& p,
                         const EstimatorTable& g, int x) {
  const Game& game = *problem.game;
  const int k = game.k();
  const double eta = problem.eta;
  const Eigen::VectorXd& q = problem.q;

  double transformation = 0.0;
  for (int a = 0; a < k; ++a) transformation += (p(a) - q(a)) * game.loss(a, x);

  double inner = 0.0;  // <q, L e_x - S>
  double best = -kInf;
  int argmax = -1;
  double stability = 0.0;
  for (int c : problem.pareto) {
    double s = 0.0;
    for (int a = 0; a < k; ++a) s += g.at(a, game.symbol(a, x), c);
    inner += q(c) * (game.loss(c, x) - s);
    if (s - game.loss(c, x) > best) {
      best = s - game.loss(c, x);
      argmax = c;
    }
    if (q(c) == 0.0) continue;
    for (int a = 0; a < k; ++a) {
      stability += q(c) * Perspective(p(a), eta * g.at(a, game.symbol(a, x), c));
    }
  }
  OutcomeTerms out;
  out.value = (transformation + inner + best) / eta + stability / (eta * eta);
  out.bias_argmax = argmax;
  if (!std::isfinite(out.value)) out.value = kInf;
  return out;
}

}  // namespace

double Xi(double x) { return std::expm1(-x) + x; }

double BiasEval(const ExoProblem& problem, const EstimatorTable& g, int outcome) {
  const Game& game = *problem.game;
  double inner = 0.0;
  double best = -kInf;
  for (int c : problem.pareto) {
    double s = 0.0;
    for (int a = 0; a < game.k(); ++a) s += g.at(a, game.symbol(a, outcome), c);
    inner += problem.q(c) * (game.loss(c, outcome) - s);
    best = std::max(best, s - game.loss(c, outcome));
  }
  return inner + best;
}

double ObjectiveEval(const ExoProblem& problem, const Eigen::VectorXd& p,
                     const EstimatorTable& g) {
  double value = -kInf;
  for (int x = 0; x < problem.game->d(); ++x) {
    value = std::max(value, EvalOutcome(problem, p, g, x).value);
  }
  return value;
}

ObjectiveSubgradient EvalWithSubgradient(const ExoProblem& problem,
                                         const Eigen::VectorXd& p,
                                         const EstimatorTable& g) {
  const Game& game = *problem.game;
  const int k = game.k();
  const double eta = problem.eta;
  const Eigen::VectorXd& q = problem.q;

  ObjectiveSubgradient out;
  out.value = -kInf;
  int bias_argmax = -1;
  for (int x = 0; x < game.d(); ++x) {
    const OutcomeTerms terms = EvalOutcome(problem, p, g, x);
    if (terms.value > out.value) {
      out.value = terms.value;
      out.active_outcome = x;
      bias_argmax = terms.bias_argmax;
    }
  }
  const int x = out.active_outcome;

  out.grad_p = Eigen::VectorXd::Zero(k);
  out.grad_g = EstimatorTable(k, g.num_symbols());
  for (int a = 0; a < k; ++a) {
    const int s = game.symbol(a, x);
    const double pa = std::max(p(a), kProbFloor);
    double dp = 0.0;
    for (int c : problem.pareto) {
      double dg = c == bias_argmax ? 1.0 : 0.0;
      if (q(c) > 0.0) {
        const double z = eta * g.at(a, s, c) / pa;
        const double ez = std::exp(-z);
        dp += q(c) * (ez * (1.0 + z) - 1.0);
        dg -= q(c) * ez;
      }
      out.grad_g.at(a, s, c) = dg / eta;
    }
    out.grad_p(a) = game.loss(a, x) / eta + dp / (eta * eta);
  }
  return out;
}

double BranchMargin(const ExoProblem& problem, const Eigen::VectorXd& p,
                    const EstimatorTable& g) {
  const Game& game = *problem.game;
  double top = -kInf;
  double second = -kInf;
  int active = 0;
  for (int x = 0; x < game.d(); ++x) {
    const double v = EvalOutcome(problem, p, g, x).value;
    if (v > top) {
      second = top;
      top = v;
      active = x;
    } else if (v > second) {
      second = v;
    }
  }
  double margin = top - second;
  double b1 = -kInf;
  double b2 = -kInf;
  for (int c : problem.pareto) {
    double s = 0.0;
    for (int a = 0; a < game.k(); ++a) s += g.at(a, game.symbol(a, active), c);
    const double v = s - game.loss(c, active);
    if (v > b1) {
      b2 = b1;
      b1 = v;
    } else if (v > b2) {
      b2 = v;
    }
  }
  return std::min(margin, b1 - b2);
}

Eigen::VectorXd ProjectRestrictedSimplex(const Eigen::VectorXd& v,
                                         const Eigen::VectorXd& q) {
  const Eigen::Index k = v.size();
  const Eigen::VectorXd lower = q / (2.0 * static_cast<double>(k));
  const double radius = 1.0 - lower.sum();
  const Eigen::VectorXd y = v - lower;

  std::vector<double> sorted(y.data(), y.data() + k);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    cumulative += sorted[i];
    const double candidate = (cumulative - radius) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) theta = candidate;
  }
  Eigen::VectorXd p(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    p(i) = std::max(y(i) - theta, 0.0) + lower(i);
  }
  return p;
}

Eigen::VectorXd SolverInitialP(const Eigen::VectorXd& q, double eta, int m) {
  const double k = static_cast<double>(q.size());
  const double gamma = std::min(0.5, eta * m * k * k / 2.0);
  return MixExploration(ProjectRestrictedSimplex(q, q), gamma);
}

namespace {

double SubgradientNorm(const ObjectiveSubgradient& sg) {
  double total = sg.grad_p.squaredNorm();
  for (double v : sg.grad_g.raw()) total += v * v;
  return std::sqrt(total);
}

// value(p) - min over the restricted simplex of the linearization in p.
double PBlockGap(const Eigen::VectorXd& grad_p, const Eigen::VectorXd& p,
                 const Eigen::VectorXd& q) {
  const double k = static_cast<double>(p.size());
  const Eigen::VectorXd lower = q / (2.0 * k);
  const double free_mass = 1.0 - lower.sum();
  const double linear_min = grad_p.dot(lower) + free_mass * grad_p.minCoeff();
  return std::max(0.0, grad_p.dot(p) - linear_min);
}

}  // namespace

OptSolution SolveExo(const ExoProblem& problem, const EstimatorTable& g0, int m,
                     const SolverOptions& options, const OptSolution* warm_start) {
  Eigen::VectorXd p = SolverInitialP(problem.q, problem.eta, m);
  EstimatorTable g = g0;
  ObjectiveSubgradient sg = EvalWithSubgradient(problem, p, g);
  if (warm_start != nullptr) {
    Eigen::VectorXd wp = ProjectRestrictedSimplex(warm_start->p, problem.q);
    ObjectiveSubgradient wsg = EvalWithSubgradient(problem, wp, warm_start->g);
    if (wsg.value < sg.value) {
      p = std::move(wp);
      g = warm_start->g;
      sg = std::move(wsg);
    }
  }
  if (!std::isfinite(sg.value)) {
    throw PmError(ErrorCode::kNonFiniteObjective,
                  "objective is not finite at the starting point");
  }

  OptSolution best;
  best.p = p;
  best.g = g;
  best.value = sg.value;
  Eigen::VectorXd best_grad_p = sg.grad_p;

  const double s0 = options.step_scale / (1.0 + SubgradientNorm(sg));
  for (int i = 1; i <= options.budget; ++i) {
    double step = s0 / std::sqrt(static_cast<double>(i));
    bool moved = false;
    for (int attempt = 0; attempt <= options.max_backoff; ++attempt) {
      Eigen::VectorXd cand_p =
          ProjectRestrictedSimplex(p - step * sg.grad_p, problem.q);
      EstimatorTable cand_g = g;
      auto& raw = cand_g.raw();
      const auto& grad = sg.grad_g.raw();
      for (std::size_t j = 0; j < raw.size(); ++j) raw[j] -= step * grad[j];
      ObjectiveSubgradient cand_sg = EvalWithSubgradient(problem, cand_p, cand_g);
      if (std::isfinite(cand_sg.value)) {
        p = std::move(cand_p);
        g = std::move(cand_g);
        sg = std::move(cand_sg);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    best.iterations = i;
    if (sg.value < best.value) {
      best.value = sg.value;
      best.p = p;
      best.g = g;
      best_grad_p = sg.grad_p;
    }
  }
  best.v_prime = std::max(0.0, best.value);
  best.eps_achieved = PBlockGap(best_grad_p, best.p, problem.q);
  return best;
}

}  // namespace pmbobw
