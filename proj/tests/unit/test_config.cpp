#include <doctest.h>

#include "pmbobw/config.hpp"
#include "pmbobw/error.hpp"

using namespace pmbobw;
using nlohmann::json;

TEST_CASE("minimal config gets defaults") {
  const RunConfig cfg = ParseRunConfig(json{{"game", "bandit2"}});
  CHECK(cfg.game->name() == "bandit2");
  CHECK(cfg.episode.algorithm == Algorithm::kBobwLocal);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
}

TEST_CASE("inline game, seeds count and overrides") {
  json doc{{"game", {{"k", 2}, {"d", 2}, {"loss", {{0, 1}, {1, 0}}}, {"feedback", {{0, 1}, {1, 0}}}}},
           {"algorithm", "bobw_global"},
           {"horizon", 50},
           {"seeds", 3},
           {"rates", {{"c1", 2.5}}}};
  ApplyOverride(doc, "rates.c2=0.5");
  ApplyOverride(doc, "horizon=70");
  const RunConfig cfg = ParseRunConfig(doc);
  CHECK(cfg.episode.horizon == 70);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(*cfg.episode.rates.c1 == 2.5);
  CHECK(*cfg.episode.rates.c2 == 0.5);
}

TEST_CASE("unknown keys and bad values are hard errors") {
  CHECK_THROWS_AS(ParseRunConfig(json{{"game", "bandit2"}, {"horizn", 5}}), PmError);
  CHECK_THROWS_AS(ParseRunConfig(json{{"game", "bandit2"}, {"algorithm", "exp3"}}), PmError);
  CHECK_THROWS_AS(ParseRunConfig(json{{"game", "bandit2"}, {"rates", {{"c9", 1}}}}), PmError);
  CHECK_THROWS_AS(ParseRunConfig(json{{"game", "bandit2"}, {"horizon", 0}}), PmError);
  CHECK_THROWS_AS(ParseRunConfig(json{{"game", "bandit2"},
                                      {"sweep", {{"budgets", {0, 5}}}}}),
                  PmError);  // budgets need the corrupted regime
}

TEST_CASE("seed list syntax") {
  CHECK(ParseSeedList("1,2,5-8") == std::vector<std::uint64_t>{1, 2, 5, 6, 7, 8});
  CHECK(ParseSeedList("4") == std::vector<std::uint64_t>{4});
  CHECK_THROWS_AS(ParseSeedList("3-1"), PmError);
  CHECK_THROWS_AS(ParseSeedList("x"), PmError);
}

TEST_CASE("missing config file names the path") {
  try {
    LoadRunConfig("/no/such/config.json");
    FAIL("expected throw");
  } catch (const PmError& e) {
    CHECK(std::string(e.what()).find("/no/such/config.json") != std::string::npos);
  }
}
