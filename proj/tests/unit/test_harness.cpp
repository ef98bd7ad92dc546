#include <doctest.h>

#include "../frozen_oracle.hpp"
#include "pmbobw/config.hpp"
#include "pmbobw/error.hpp"
#include "pmbobw/harness.hpp"
#include "pmbobw/rng.hpp"

using namespace pmbobw;
using nlohmann::json;

namespace {

RunConfig Config(json doc) { return ParseRunConfig(doc); }

RunTrace FixedActionTrace(const Game& g, int action, int T, const Eigen::VectorXd& nu) {
  RunTrace tr;
  tr.horizon = T;
  tr.k = g.k();
  for (int t = 1; t <= T; ++t) {
    tr.actions.push_back(action);
    const double u = CounterUniform(5, RngStream::kOutcome, t);
    tr.outcomes.push_back(u < nu(0) ? 0 : 1);
  }
  tr.outcomes_pre = tr.outcomes;
  return tr;
}

}  // namespace

TEST_CASE("pseudo regret of fixed actions") {
  const Game g = CatalogGame("bandit2");
  const Eigen::VectorXd nu = Eigen::Vector2d(0.7, 0.3);
  const int T = 20000;
  int hindsight = -1;
  const auto best = PseudoRegret(FixedActionTrace(g, 0, T, nu), g, &hindsight);
  CHECK(hindsight == 0);
  for (double v : best) CHECK(v == 0.0);
  const auto worst = PseudoRegret(FixedActionTrace(g, 1, T, nu), g);
  CHECK(worst.back() >= 0.0);
  CHECK(worst.back() == doctest::Approx(0.4 * T).epsilon(0.05));
}

TEST_CASE("trivial game short-circuits") {
  const RunConfig cfg = Config({{"game", "trivial_small"}, {"horizon", 300},
                                {"environment", {{"type", "stochastic"}, {"nu", {0.5, 0.5}}}}});
  const PreparedGame prepared = PrepareGame(*cfg.game, cfg.episode.algorithm);
  const RunTrace tr = RunEpisode(prepared, cfg.episode, 1);
  for (int a : tr.actions) CHECK(a == 0);
  CHECK(tr.regret_curve.back() == 0.0);
}

TEST_CASE("classification mismatches are refused") {
  CHECK_THROWS_AS(PrepareGame(CatalogGame("hopeless_small"), Algorithm::kBobwGlobal), PmError);
  try {
    PrepareGame(CatalogGame("dynamic_pricing_small"), Algorithm::kBobwLocal);
    FAIL("expected throw");
  } catch (const PmError& e) {
    CHECK(e.code() == ErrorCode::kClassificationMismatch);
  }
  CHECK_NOTHROW(PrepareGame(CatalogGame("bandit2"), Algorithm::kBobwGlobal));
}

TEST_CASE("episodes are deterministic and p sums to one") {
  for (const char* algo : {"bobw_local", "bobw_global", "fixed_rate_baseline"}) {
    CAPTURE(algo);
    const RunConfig cfg =
        Config({{"game", "bandit3"}, {"algorithm", algo}, {"horizon", 400},
                {"environment", {{"type", "stochastic"}, {"nu", {0.5, 0.3, 0.2}}}},
                {"debug_asserts", true}});
    const PreparedGame prepared = PrepareGame(*cfg.game, cfg.episode.algorithm);
    const RunTrace a = RunEpisode(prepared, cfg.episode, 7);
    const RunTrace b = RunEpisode(prepared, cfg.episode, 7);
    CHECK(TraceCsv(a) == TraceCsv(b));
    CHECK(a.invariants.total() == 0);
    for (int t = 1; t <= 400; ++t) CHECK(a.PAt(t).sum() == doctest::Approx(1.0));
    const RunTrace c = RunEpisode(prepared, cfg.episode, 8);
    CHECK(TraceCsv(a) != TraceCsv(c));
  }
}

TEST_CASE("frozen global schedule matches the fixed-rate baseline") {
  const json env{{"type", "adversarial"}, {"generator", "cell_switching"}};
  const RunConfig global = Config({{"game", "dynamic_pricing_small"}, {"algorithm", "bobw_global"},
                                   {"horizon", 2000}, {"environment", env},
                                   {"rates", {{"c2", 0}, {"beta1", 8}, {"gamma", 0.1}}}});
  const RunConfig base = Config({{"game", "dynamic_pricing_small"},
                                 {"algorithm", "fixed_rate_baseline"}, {"horizon", 2000},
                                 {"environment", env},
                                 {"rates", {{"eta", 0.125}, {"gamma", 0.1}}}});
  const RunTrace a =
      RunEpisode(PrepareGame(*global.game, global.episode.algorithm), global.episode, 3);
  const RunTrace b = RunEpisode(PrepareGame(*base.game, base.episode.algorithm), base.episode, 3);
  CHECK(TraceCsv(a) == TraceCsv(b));
  CHECK(a.p == b.p);
}

TEST_CASE("lemma 5 margin on completed traces") {
  const RunConfig cfg = Config({{"game", "bandit2"}, {"horizon", 2000},
                                {"environment", {{"type", "stochastic"}, {"nu", {0.7, 0.3}}}}});
  const PreparedGame prepared = PrepareGame(*cfg.game, cfg.episode.algorithm);
  const RunTrace tr = RunEpisode(prepared, cfg.episode, 2);
  CHECK(tr.q_astar_curve.back() > 0.0);
  CHECK(tr.lemma5_margin >= 0.0);
  CHECK(Lemma5Margin(1.0, 1.0, 2, 1) == doctest::Approx(std::log(2.0 * std::exp(1.0)) - 1.0));
}

TEST_CASE("theoretical overlays") {
  BoundInputs in;
  in.horizon = 10000;
  CHECK(TheoreticalBounds(BoundFamily::kLocal, 2, 2, 2, 1.0, in).adversarial ==
        doctest::Approx(frozen::kLocalOverlay).epsilon(1e-12));
  CHECK(TheoreticalBounds(BoundFamily::kGlobal, 2, 3, 3, 1.5, in).adversarial ==
        doctest::Approx(frozen::kGlobalOverlayPricing).epsilon(1e-12));
  in.delta_min = 0.2;
  const double stoch = *TheoreticalBounds(BoundFamily::kLocal, 2, 2, 2, 1.0, in).stochastic;
  in.corruption = 100.0;
  const double corr = *TheoreticalBounds(BoundFamily::kLocal, 2, 2, 2, 1.0, in).stochastic;
  CHECK(corr == doctest::Approx(stoch + std::sqrt(100.0 * stoch)));
  in.corruption = 0.0;
  in.delta_min = 0.0;
  CHECK_THROWS_AS(TheoreticalBounds(BoundFamily::kLocal, 2, 2, 2, 1.0, in), PmError);
}

TEST_CASE("summaries") {
  CHECK_THROWS_AS(Summarize({}), PmError);
  const RunConfig cfg = Config({{"game", "bandit2"}, {"horizon", 1500},
                                {"environment", {{"type", "stochastic"}, {"nu", {0.7, 0.3}}}}});
  const PreparedGame prepared = PrepareGame(*cfg.game, cfg.episode.algorithm);
  const RunTrace tr = RunEpisode(prepared, cfg.episode, 1);
  const AggregateSummary one = Summarize({tr});
  CHECK(one.mean_final == tr.regret_curve.back());
  CHECK(one.runs.size() == 1);
  const AggregateSummary two = Summarize({tr, tr});
  CHECK(two.std_final == 0.0);
  for (double s : two.std_curve) CHECK(s == 0.0);
  CHECK(SummaryToJson(one)["runs"][0]["final_regret"] == tr.regret_curve.back());
}

TEST_CASE("checkpoints and csv layout") {
  const auto c = TraceCheckpoints(5000);
  CHECK(c.front() == 1);
  CHECK(c[999] == 1000);
  CHECK(c[1000] == 1005);
  CHECK(c.back() == 5000);
  CHECK(TraceCheckpoints(10).size() == 10);

  const RunConfig cfg = Config({{"game", "bandit2"}, {"horizon", 20},
                                {"environment", {{"type", "stochastic"}, {"nu", {0.7, 0.3}}}}});
  const RunTrace tr = RunEpisode(PrepareGame(*cfg.game, cfg.episode.algorithm), cfg.episode, 1);
  const std::string csv = TraceCsv(tr);
  CHECK(csv.rfind("t,action,outcome,outcome_pre,symbol,loss,regret_cum,q_astar,entropy,"
                  "eta_or_beta,gamma,v_prime\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("solve_every reuses the solution between solves") {
  const RunConfig cfg = Config({{"game", "bandit2"}, {"horizon", 100},
                                {"solver", {{"solve_every", 10}}},
                                {"environment", {{"type", "stochastic"}, {"nu", {0.7, 0.3}}}}});
  const RunTrace tr = RunEpisode(PrepareGame(*cfg.game, cfg.episode.algorithm), cfg.episode, 1);
  CHECK(tr.solve_every_deviation);
  int solves = 0;
  for (int it : tr.solver_iterations) solves += it > 0;
  CHECK(solves == 10);
  CHECK(tr.invariants.total() == 0);
}
