#include "pmbobw/lp.hpp"

#include <cmath>
#include <limits>

namespace pmbobw {

void LinearProgram::AddLessEqual(const Eigen::RowVectorXd& row, double rhs) {
  a_ub.conservativeResize(a_ub.rows() + 1, Eigen::NoChange);
  a_ub.row(a_ub.rows() - 1) = row;
  b_ub.conservativeResize(b_ub.size() + 1);
  b_ub(b_ub.size() - 1) = rhs;
}

void LinearProgram::AddEqual(const Eigen::RowVectorXd& row, double rhs) {
  a_eq.conservativeResize(a_eq.rows() + 1, Eigen::NoChange);
  a_eq.row(a_eq.rows() - 1) = row;
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq(b_eq.size() - 1) = rhs;
}

namespace {

// Tableau layout: rows 0..m-1 are constraints, row m is the objective
// (reduced costs, with -z in the last column). Column `rhs` holds b.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<int> basis, const LpOptions& options)
      : t_(std::move(t)), basis_(std::move(basis)), options_(options) {}

  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int rhs() const { return static_cast<int>(t_.cols()) - 1; }
  Eigen::MatrixXd& data() { return t_; }
  std::vector<int>& basis() { return basis_; }

  void Pivot(int row, int col) {
    const double pivot = t_(row, col);
    t_.row(row) /= pivot;
    for (int r = 0; r < t_.rows(); ++r) {
      if (r == row) continue;
      const double factor = t_(r, col);
      if (factor != 0.0) t_.row(r) -= factor * t_.row(row);
    }
    basis_[row] = col;
  }

  // Prices out basic columns from the objective row.
  void Canonicalize() {
    const int m = rows();
    for (int r = 0; r < m; ++r) {
      const double factor = t_(m, basis_[r]);
      if (factor != 0.0) t_.row(m) -= factor * t_.row(r);
    }
  }

  // Runs simplex iterations over columns [0, num_cols). Returns kOptimal,
  // kUnbounded or kIterationLimit.
  LpStatus Run(int num_cols, int& iterations) {
    const int m = rows();
    const double tol = options_.pivot_tolerance;
    while (iterations < options_.max_iterations) {
      int enter = -1;
      for (int j = 0; j < num_cols; ++j) {
        if (t_(m, j) < -tol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        const double a = t_(r, enter);
        if (a <= tol) continue;
        const double ratio = t_(r, rhs()) / a;
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && leave >= 0 &&
             basis_[r] < basis_[leave])) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      Pivot(leave, enter);
      ++iterations;
    }
    return LpStatus::kIterationLimit;
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  const LpOptions& options_;
};

}  // namespace

LpResult SolveLp(const LinearProgram& lp, const LpOptions& options) {
  const int n = lp.num_vars();
  std::vector<bool> is_free = lp.free_vars;
  is_free.resize(n, false);

  // Standard-form columns: one per original variable, plus a negative part
  // for each free variable.
  std::vector<int> neg_col(n, -1);
  int num_struct = n;
  for (int j = 0; j < n; ++j) {
    if (is_free[j]) neg_col[j] = num_struct++;
  }
  const int m_ub = static_cast<int>(lp.a_ub.rows());
  const int m_eq = static_cast<int>(lp.a_eq.rows());
  const int m = m_ub + m_eq;
  const int num_slack = m_ub;
  const int first_art = num_struct + num_slack;
  const int total = first_art + m;

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, total + 1);
  auto fill_row = [&](int r, const Eigen::RowVectorXd& coeffs, double rhs,
                      int slack) {
    for (int j = 0; j < n; ++j) {
      t(r, j) = coeffs(j);
      if (neg_col[j] >= 0) t(r, neg_col[j]) = -coeffs(j);
    }
    if (slack >= 0) t(r, slack) = 1.0;
    t(r, total) = rhs;
    if (rhs < 0) t.row(r) *= -1.0;
    t(r, first_art + r) = 1.0;
  };
  for (int i = 0; i < m_ub; ++i) {
    fill_row(i, lp.a_ub.row(i), lp.b_ub(i), num_struct + i);
  }
  for (int i = 0; i < m_eq; ++i) {
    fill_row(m_ub + i, lp.a_eq.row(i), lp.b_eq(i), -1);
  }

  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) basis[r] = first_art + r;

  LpResult result;
  Tableau tab(std::move(t), std::move(basis), options);

  // Phase one: minimize the sum of artificials.
  for (int r = 0; r < m; ++r) tab.data()(m, first_art + r) = 1.0;
  tab.Canonicalize();
  LpStatus status = tab.Run(total, result.iterations);
  if (status == LpStatus::kIterationLimit) {
    result.status = status;
    return result;
  }
  const double infeasibility = -tab.data()(m, total);
  if (infeasibility > options.feasibility_tolerance) {
    result.status = LpStatus::kInfeasible;
    return result;
  }

  // Drive artificials out of the basis; rows where that is impossible are
  // redundant and get zeroed.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < first_art) continue;
    int col = -1;
    for (int j = 0; j < first_art; ++j) {
      if (std::abs(tab.data()(r, j)) > options.pivot_tolerance) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      tab.Pivot(r, col);
      ++result.iterations;
    } else {
      tab.data().row(r).setZero();
      tab.data()(r, tab.basis()[r]) = 1.0;
    }
  }

  // Phase two over structural and slack columns only.
  tab.data().row(m).setZero();
  for (int j = 0; j < n; ++j) {
    tab.data()(m, j) = lp.objective(j);
    if (neg_col[j] >= 0) tab.data()(m, neg_col[j]) = -lp.objective(j);
  }
  tab.Canonicalize();
  status = tab.Run(first_art, result.iterations);
  if (status != LpStatus::kOptimal) {
    result.status = status;
    return result;
  }

  Eigen::VectorXd std_x = Eigen::VectorXd::Zero(total);
  for (int r = 0; r < m; ++r) std_x(tab.basis()[r]) = tab.data()(r, total);
  result.x.resize(n);
  for (int j = 0; j < n; ++j) {
    result.x(j) = std_x(j) - (neg_col[j] >= 0 ? std_x(neg_col[j]) : 0.0);
  }
  result.value = lp.objective.dot(result.x);
  result.status = LpStatus::kOptimal;
  return result;
}

}  // namespace pmbobw
