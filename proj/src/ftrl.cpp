#include "pmbobw/ftrl.hpp"

#include <cmath>
#include <limits>

#include "pmbobw/error.hpp"

namespace pmbobw {

Eigen::VectorXd ComputeQ(const Eigen::VectorXd& cumulative_loss,
                         std::span<const int> pareto, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw PmError(ErrorCode::kNonFiniteInput, "learning rate must be positive");
  }
  if (pareto.empty()) {
    throw PmError(ErrorCode::kInvalidArgument, "empty Pareto set");
  }
  double lowest = std::numeric_limits<double>::infinity();
  for (int a : pareto) {
    const double v = cumulative_loss(a);
    if (!std::isfinite(v)) {
      throw PmError(ErrorCode::kNonFiniteInput, "cumulative loss is not finite");
    }
    lowest = std::min(lowest, v);
  }
  Eigen::VectorXd q = Eigen::VectorXd::Zero(cumulative_loss.size());
  double total = 0.0;
  for (int a : pareto) {
    q(a) = std::exp(-eta * (cumulative_loss(a) - lowest));
    total += q(a);
  }
  q /= total;
  return q;
}

double ShannonEntropy(const Eigen::VectorXd& q) {
  double h = 0.0;
  for (Eigen::Index a = 0; a < q.size(); ++a) {
    if (q(a) > 0.0) h -= q(a) * std::log(std::max(q(a), 1e-300));
  }
  return h;
}

Eigen::VectorXd MixExploration(const Eigen::VectorXd& q, double gamma) {
  const double k = static_cast<double>(q.size());
  return ((1.0 - gamma) * q).array() + gamma / k;
}

LocalRateSchedule::LocalRateSchedule(double c1, double lower_beta, int k_pi)
    : c1_(c1),
      lower_beta_(lower_beta),
      log_k_pi_(std::log(static_cast<double>(k_pi))),
      beta_prime_(c1) {
  if (k_pi < 2) {
    throw PmError(ErrorCode::kInvalidArgument,
                  "local rate schedule needs at least two Pareto actions");
  }
}

double LocalRateSchedule::Step(double entropy) {
  entropy_sum_ += entropy;
  beta_prime_ += c1_ / std::sqrt(1.0 + entropy_sum_ / log_k_pi_);
  return eta();
}

GlobalRateSchedule::GlobalRateSchedule(double c1, double c2, double c_g,
                                       double beta1)
    : c1_(c1), c2_(c2), c_g_(c_g), beta_(beta1) {}

GlobalRateStep GlobalRateSchedule::Step(double a_t, double b_t) {
  ++round_;
  if (round_ >= 2) weighted_sum_ += prev_ratio_ * a_t;
  b_sum_ += b_t;
  const double denom = c1_ + std::cbrt(b_sum_);

  GlobalRateStep step;
  step.beta = beta_;
  step.gamma_prime = 0.25 * c1_ * b_t / denom;
  step.gamma = step.gamma_prime + c_g_ / (2.0 * beta_);
  const double ratio = 4.0 * denom / c1_;
  beta_ += c2_ * ratio / std::sqrt(c1_ + weighted_sum_);
  step.beta_next = beta_;
  prev_ratio_ = ratio;
  return step;
}

}  // namespace pmbobw
