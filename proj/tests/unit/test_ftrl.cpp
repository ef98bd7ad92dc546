#include <doctest.h>

#include <cmath>
#include <random>

#include "../frozen_oracle.hpp"
#include "pmbobw/error.hpp"
#include "pmbobw/ftrl.hpp"

using namespace pmbobw;

namespace {

std::vector<long double> SoftmaxReference(const Eigen::VectorXd& l, const std::vector<int>& s,
                                          double eta) {
  long double lo = 1e300L;
  for (int a : s) lo = std::min(lo, static_cast<long double>(l(a)));
  std::vector<long double> out(l.size(), 0.0L);
  long double z = 0.0L;
  for (int a : s) {
    out[a] = std::exp(-static_cast<long double>(eta) * (l(a) - lo));
    z += out[a];
  }
  for (auto& v : out) v /= z;
  return out;
}

}  // namespace

TEST_CASE("q matches a long double reference and is zero off Pareto") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  const std::vector<int> pareto{0, 2, 3};
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd l(5);
    for (int i = 0; i < 5; ++i) l(i) = u(gen);
    const double eta = std::pow(10.0, u(gen) / 20.0);
    const Eigen::VectorXd q = ComputeQ(l, pareto, eta);
    const auto ref = SoftmaxReference(l, pareto, eta);
    CHECK(q.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q(1) == 0.0);
    CHECK(q(4) == 0.0);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(q(i) - static_cast<double>(ref[i])) < 1e-12);
  }
}

TEST_CASE("q edge cases") {
  const std::vector<int> pareto{0, 1};
  CHECK(ComputeQ(Eigen::Vector2d(3, 3), pareto, 1.0)(0) == doctest::Approx(0.5));
  // huge gaps do not overflow
  const Eigen::VectorXd q = ComputeQ(Eigen::Vector2d(0, 1e6), pareto, 1.0);
  CHECK(q(0) == 1.0);
  CHECK(q(1) == 0.0);
  CHECK_THROWS_AS(ComputeQ(Eigen::Vector2d(0, std::nan("")), pareto, 1.0), PmError);
  CHECK(ComputeQ(Eigen::Vector2d(5, 1), std::vector<int>{0}, 1.0)(0) == 1.0);
}

TEST_CASE("entropy and mixing") {
  CHECK(ShannonEntropy(Eigen::Vector2d(0.5, 0.5)) == doctest::Approx(std::log(2.0)));
  CHECK(ShannonEntropy(Eigen::Vector3d(1, 0, 0)) == 0.0);
  const Eigen::VectorXd p = MixExploration(Eigen::Vector2d(1, 0), 0.5);
  CHECK(p(0) == doctest::Approx(0.75));
  CHECK(p(1) == doctest::Approx(0.25));
}

TEST_CASE("local schedule recurrence") {
  LocalRateSchedule first(3.0, 5.0, 2);
  CHECK(first.eta() == doctest::Approx(1.0 / 5.0));  // max(B, c1)

  LocalRateSchedule zero(2.0, 0.0, 2);
  for (int t = 1; t <= 4; ++t) zero.Step(0.0);
  CHECK(zero.beta_prime() == doctest::Approx(2.0 * 5));  // c1 (1 + t)

  LocalRateSchedule flat(2.0, 1.0, 2);
  for (int t = 0; t < 3; ++t) flat.Step(std::log(2.0));
  CHECK(flat.beta_prime() == doctest::Approx(frozen::kLocalBetaThreeSteps).epsilon(1e-14));

  CHECK_THROWS_AS(LocalRateSchedule(1.0, 1.0, 1), PmError);
}

TEST_CASE("local schedule increments lie in (0, c1]") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, std::log(4.0));
  LocalRateSchedule s(1.7, 2.0, 4);
  double prev = s.beta_prime();
  double prev_beta = s.beta();
  for (int t = 0; t < 1000; ++t) {
    s.Step(u(gen));
    const double inc = s.beta_prime() - prev;
    CHECK(inc > 0.0);
    CHECK(inc <= 1.7 + 1e-15);
    CHECK(s.beta() >= prev_beta);
    prev = s.beta_prime();
    prev_beta = s.beta();
  }
}

TEST_CASE("global schedule first step") {
  GlobalRateSchedule s(2.0, 1.0, 1.0, 4.0);
  const GlobalRateStep step = s.Step(std::log(2.0), 0.5);
  CHECK(step.gamma_prime == doctest::Approx(frozen::kGammaPrimeC1Two).epsilon(1e-14));
  CHECK(step.beta == 4.0);
  CHECK(step.gamma == doctest::Approx(frozen::kGammaPrimeC1Two + 1.0 / 8.0));
  // first increment: c2 (b/gamma') / sqrt(c1)
  CHECK(step.beta_next == doctest::Approx(4.0 + 0.5 / frozen::kGammaPrimeC1Two / std::sqrt(2.0)));
}

TEST_CASE("global schedule stays bounded and monotone") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c_g = 2.0;
  GlobalRateSchedule s(1.5, 1.2, c_g, 2.0 * c_g);
  double beta = s.beta();
  for (int t = 0; t < 2000; ++t) {
    const double b = t % 97 == 0 ? 0.0 : 0.5 * u(gen);
    const GlobalRateStep step = s.Step(std::log(3.0) * u(gen), b);
    CHECK(step.beta >= beta);
    CHECK(step.beta_next >= step.beta);
    CHECK(std::isfinite(step.beta_next));
    CHECK(step.gamma <= 0.5);
    beta = step.beta;
  }
}
