#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmbobw/estimation.hpp"
#include "pmbobw/game.hpp"

namespace pmbobw {

// xi(x) = exp(-x) + x - 1.
double Xi(double x);

// Fixed data of one restricted exploration-by-optimization problem.
struct ExoProblem {
  const Game* game = nullptr;
  std::vector<int> pareto;
  Eigen::VectorXd q;  // length k, zero off the Pareto set
  double eta = 0.0;
};

// bias_q(G; x) = <q, L e_x - sum_a G(a, Phi_ax)> + max_{c in Pareto}
// (sum_a G(a, Phi_ax)_c - L_cx).
double BiasEval(const ExoProblem& problem, const EstimatorTable& g, int outcome);

// max over outcomes of transformation + bias/eta + stability. Returns +inf
// when the stability term overflows.
double ObjectiveEval(const ExoProblem& problem, const Eigen::VectorXd& p,
                     const EstimatorTable& g);

struct ObjectiveSubgradient {
  double value = 0.0;
  int active_outcome = 0;
  Eigen::VectorXd grad_p;
  EstimatorTable grad_g;
};

// Value plus a subgradient taken from the active outcome (lowest index on
// ties) and the lowest-index maximizer inside the bias term.
ObjectiveSubgradient EvalWithSubgradient(const ExoProblem& problem,
                                         const Eigen::VectorXd& p,
                                         const EstimatorTable& g);

// Distance from the nearest kink of the objective at (p, G): the smaller of
// the gap between the two largest outcome values and, at the active outcome,
// the gap between the two largest bias branches. +inf when there is no
// competing branch.
double BranchMargin(const ExoProblem& problem, const Eigen::VectorXd& p,
                    const EstimatorTable& g);

// Euclidean projection onto {p : sum p = 1, p_a >= q_a / (2k)}.
Eigen::VectorXd ProjectRestrictedSimplex(const Eigen::VectorXd& v,
                                         const Eigen::VectorXd& q);

struct SolverOptions {
  int budget = 200;
  double step_scale = 1.0;
  int max_backoff = 60;
};

struct OptSolution {
  Eigen::VectorXd p;
  EstimatorTable g;
  double value = 0.0;
  double v_prime = 0.0;
  int iterations = 0;
  // Best-effort gap: value minus the linear lower bound of the p-block at the
  // best iterate (the unconstrained G-block is not bounded).
  double eps_achieved = 0.0;
};

// Starting point used when no warm start is given:
// p0 = (1 - gamma) q + gamma/k with gamma = min(1/2, eta m k^2 / 2).
Eigen::VectorXd SolverInitialP(const Eigen::VectorXd& q, double eta, int m);

// Projected subgradient descent over (p, G) with p kept in the restricted
// simplex. Returns the best iterate seen, never worse than the start point.
OptSolution SolveExo(const ExoProblem& problem, const EstimatorTable& g0, int m,
                     const SolverOptions& options = {},
                     const OptSolution* warm_start = nullptr);

}  // namespace pmbobw
