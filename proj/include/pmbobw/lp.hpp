#pragma once

#include <vector>

#include <Eigen/Dense>

namespace pmbobw {

// minimize c^T x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,
//                       x_j >= 0 unless free_vars[j].
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  std::vector<bool> free_vars;  // empty means all variables are nonnegative

  explicit LinearProgram(int num_vars)
      : objective(Eigen::VectorXd::Zero(num_vars)),
        a_ub(0, num_vars),
        a_eq(0, num_vars) {}

  int num_vars() const { return static_cast<int>(objective.size()); }
  void AddLessEqual(const Eigen::RowVectorXd& row, double rhs);
  void AddEqual(const Eigen::RowVectorXd& row, double rhs);
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpOptions {
  int max_iterations = 20000;
  double pivot_tolerance = 1e-9;
  // Phase-one objective above this means the constraints are inconsistent.
  double feasibility_tolerance = 1e-7;
};

struct LpResult {
  LpStatus status = LpStatus::kIterationLimit;
  double value = 0.0;
  Eigen::VectorXd x;
  int iterations = 0;
};

// Dense two-phase tableau simplex with Bland's rule. Meant for the tiny
// programs that show up in game geometry (tens of variables).
LpResult SolveLp(const LinearProgram& lp, const LpOptions& options = {});

}  // namespace pmbobw
