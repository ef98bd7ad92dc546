#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pmbobw {

// Shannon-entropy FTRL iterate restricted to `pareto`:
// q_a proportional to exp(-eta * cumulative_loss_a) for a in pareto, 0 elsewhere.
// Throws NonFiniteInput.
Eigen::VectorXd ComputeQ(const Eigen::VectorXd& cumulative_loss,
                         std::span<const int> pareto, double eta);

// Natural-log entropy with 0 log 0 = 0.
double ShannonEntropy(const Eigen::VectorXd& q);

// p = (1 - gamma) q + gamma / k.
Eigen::VectorXd MixExploration(const Eigen::VectorXd& q, double gamma);

/// Learning rate for the locally observable algorithm.
///
/// beta'_1 = c1, beta'_{t+1} = beta'_t + c1 / sqrt(1 + H_{1..t} / log k_pi),
/// beta_t = max(B, beta'_t), eta_t = 1 / beta_t.
class LocalRateSchedule {
 public:
  LocalRateSchedule(double c1, double lower_beta, int k_pi);

  double eta() const { return 1.0 / beta(); }
  double beta() const { return std::max(lower_beta_, beta_prime_); }
  double beta_prime() const { return beta_prime_; }
  double entropy_sum() const { return entropy_sum_; }
  double c1() const { return c1_; }
  double lower_beta() const { return lower_beta_; }

  // Records H(q_t) and advances to round t+1. Returns eta_{t+1}.
  double Step(double entropy);

 private:
  double c1_;
  double lower_beta_;
  double log_k_pi_;
  double beta_prime_;
  double entropy_sum_ = 0.0;
};

struct GlobalRateStep {
  double beta = 0.0;         // beta_t, used for q_t
  double gamma_prime = 0.0;  // gamma'_t
  double gamma = 0.0;        // gamma_t
  double beta_next = 0.0;    // beta_{t+1}
};

/// Learning rate and exploration rate for the globally observable algorithm.
///
/// gamma'_t = c1 b_t / (4 (c1 + (sum_{s<=t} b_s)^{1/3})),
/// gamma_t = gamma'_t + c_G / (2 beta_t),
/// beta_{t+1} = beta_t + c2 (b_t / gamma'_t) / sqrt(c1 + sum_{s<t} a_{s+1} b_s / gamma'_s).
///
/// The ratio b_t / gamma'_t is evaluated as 4 (c1 + B_t^{1/3}) / c1, which is
/// the same value for b_t > 0 and its limit at b_t = 0.
class GlobalRateSchedule {
 public:
  GlobalRateSchedule(double c1, double c2, double c_g, double beta1);

  double beta() const { return beta_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double c_g() const { return c_g_; }
  int round() const { return round_; }

  // Consumes a_t = H(q_t) and b_t = 1 - max_a q_{t,a} for the current round.
  GlobalRateStep Step(double a_t, double b_t);

 private:
  double c1_;
  double c2_;
  double c_g_;
  double beta_;
  int round_ = 0;
  double b_sum_ = 0.0;
  double weighted_sum_ = 0.0;  // sum_{s<t} a_{s+1} b_s / gamma'_s
  double prev_ratio_ = 0.0;    // b_{t-1} / gamma'_{t-1}
};

}  // namespace pmbobw
