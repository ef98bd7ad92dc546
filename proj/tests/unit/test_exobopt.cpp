#include <doctest.h>

#include <random>

#include "pmbobw/error.hpp"
#include "pmbobw/estimation.hpp"
#include "pmbobw/exobopt.hpp"
#include "pmbobw/game.hpp"
#include "pmbobw/geometry.hpp"

using namespace pmbobw;

namespace {

struct Fixture {
  Game game;
  GameClass cls;
  GlobalEstimator est;
  int m;

  explicit Fixture(const std::string& name)
      : game(CatalogGame(name)),
        cls(Classify(game)),
        est(BuildGlobalEstimator(game, cls.geometry, cls.local_witnesses,
                                 ObservabilityMode::kLocal)),
        m(ComputeSymbolStats(game).m) {}

  ExoProblem Problem(const Eigen::VectorXd& q, double eta) const {
    return ExoProblem{&game, cls.geometry.pareto, q, eta};
  }
};

Eigen::VectorXd RandomSimplex(std::mt19937_64& gen, int k) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd v(k);
  for (int i = 0; i < k; ++i) v(i) = e(gen);
  return v / v.sum();
}

}  // namespace

TEST_CASE("xi is nonnegative and accurate near zero") {
  CHECK(Xi(0.0) == 0.0);
  CHECK(Xi(1e-8) == doctest::Approx(0.5e-16).epsilon(1e-6));
  CHECK(Xi(1.0) == doctest::Approx(std::exp(-1.0)));
  for (double x = -5; x <= 5; x += 0.25) CHECK(Xi(x) >= 0.0);
}

TEST_CASE("unbiased estimator has zero bias") {
  const Fixture f("bandit3");
  const ExoProblem pr = f.Problem(Eigen::Vector3d(0.2, 0.3, 0.5), 0.01);
  for (int x = 0; x < 3; ++x) CHECK(std::abs(BiasEval(pr, f.est.table, x)) < 1e-12);
}

TEST_CASE("projection onto the restricted simplex") {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + trial % 4;
    const Eigen::VectorXd q = RandomSimplex(gen, k);
    Eigen::VectorXd v(k);
    for (int i = 0; i < k; ++i) v(i) = n(gen);
    const Eigen::VectorXd p = ProjectRestrictedSimplex(v, q);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < k; ++i) CHECK(p(i) >= q(i) / (2.0 * k) - 1e-15);
    // optimality: no feasible point closer among random candidates
    for (int c = 0; c < 20; ++c) {
      const Eigen::VectorXd z = RandomSimplex(gen, k);
      const Eigen::VectorXd cand = 0.5 * z + 0.5 * ProjectRestrictedSimplex(z, q);
      const Eigen::VectorXd feas = ProjectRestrictedSimplex(cand, q);
      CHECK((p - v).norm() <= (feas - v).norm() + 1e-12);
    }
    // idempotent
    CHECK((ProjectRestrictedSimplex(p, q) - p).norm() < 1e-12);
  }
}

TEST_CASE("objective is convex along random segments") {
  const Fixture f("bandit3");
  std::mt19937_64 gen(2);
  std::normal_distribution<double> n(0.0, 0.3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eta = 1.0 / (2.0 * f.m * 9);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd q = RandomSimplex(gen, 3);
    const ExoProblem pr = f.Problem(q, eta);
    const Eigen::VectorXd p1 = ProjectRestrictedSimplex(RandomSimplex(gen, 3), q);
    const Eigen::VectorXd p2 = ProjectRestrictedSimplex(RandomSimplex(gen, 3), q);
    EstimatorTable g1 = f.est.table;
    EstimatorTable g2 = f.est.table;
    for (double& v : g1.raw()) v += n(gen);
    for (double& v : g2.raw()) v += n(gen);
    const double lam = u(gen);
    EstimatorTable gm = g1;
    for (std::size_t i = 0; i < gm.raw().size(); ++i) {
      gm.raw()[i] = lam * g1.raw()[i] + (1 - lam) * g2.raw()[i];
    }
    const double mix = ObjectiveEval(pr, lam * p1 + (1 - lam) * p2, gm);
    const double chord = lam * ObjectiveEval(pr, p1, g1) + (1 - lam) * ObjectiveEval(pr, p2, g2);
    CHECK(mix <= chord + 1e-9 * std::max(1.0, std::abs(chord)));
  }
}

TEST_CASE("subgradient agrees with finite differences") {
  const Fixture f("bandit2");
  const Eigen::VectorXd q = Eigen::Vector2d(0.35, 0.65);
  const ExoProblem pr = f.Problem(q, 0.05);
  const Eigen::VectorXd p = Eigen::Vector2d(0.4, 0.6);
  EstimatorTable g = f.est.table;
  g.at(0, 1, 0) += 0.2;
  const ObjectiveSubgradient sg = EvalWithSubgradient(pr, p, g);
  CHECK(sg.value == doctest::Approx(ObjectiveEval(pr, p, g)));
  const double h = 1e-6;
  for (int a = 0; a < 2; ++a) {
    Eigen::VectorXd pp = p, pm = p;
    pp(a) += h;
    pm(a) -= h;
    const double fd = (ObjectiveEval(pr, pp, g) - ObjectiveEval(pr, pm, g)) / (2 * h);
    CHECK(fd == doctest::Approx(sg.grad_p(a)).epsilon(1e-4));
  }
}

TEST_CASE("solver respects the restricted simplex and never gets worse") {
  const Fixture f("bandit3");
  std::mt19937_64 gen(4);
  const double eta = 1.0 / (2.0 * f.m * 9);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd q = RandomSimplex(gen, 3);
    const ExoProblem pr = f.Problem(q, eta);
    const OptSolution s = SolveExo(pr, f.est.table, f.m);
    CHECK(s.p.sum() == doctest::Approx(1.0));
    for (int a = 0; a < 3; ++a) CHECK(s.p(a) >= q(a) / 6.0 - 1e-12);
    CHECK(s.value <= ObjectiveEval(pr, SolverInitialP(q, eta, f.m), f.est.table) + 1e-12);
    CHECK(s.v_prime >= 0.0);
    CHECK(s.v_prime <= 3.0 * f.m * f.m * 27);
  }
}
