#include <doctest.h>

#include <filesystem>

#include "pmbobw/error.hpp"
#include "pmbobw/game.hpp"

using namespace pmbobw;

namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const PmError& e) {
    return e.code();
  }
  FAIL("expected PmError");
  return ErrorCode::kInvariantViolation;
}

}  // namespace

TEST_CASE("validate accepts bandit2 and counts symbols") {
  LossMatrix l(2, 2);
  l << 0, 1, 1, 0;
  FeedbackMatrix f(2, 2);
  f << 0, 1, 1, 0;
  const Game g = ValidateGame(l, f, "b2");
  CHECK(g.k() == 2);
  CHECK(g.d() == 2);
  CHECK(g.num_symbols() == 2);
  CHECK(ComputeSymbolStats(g).m == 2);
}

TEST_CASE("validate rejects malformed games") {
  LossMatrix l(2, 2);
  l << 0, 1, 1, 0;
  FeedbackMatrix f3(2, 3);
  f3.setZero();
  CHECK(CodeOf([&] { ValidateGame(l, f3); }) == ErrorCode::kDimensionMismatch);

  LossMatrix bad = l;
  bad(0, 0) = 1.5;
  FeedbackMatrix f(2, 2);
  f.setZero();
  CHECK(CodeOf([&] { ValidateGame(bad, f); }) == ErrorCode::kLossOutOfRange);

  CHECK(CodeOf([&] { ValidateGame(LossMatrix(0, 0), FeedbackMatrix(0, 0)); }) ==
        ErrorCode::kEmptyGame);

  FeedbackMatrix neg = f;
  neg(1, 1) = -1;
  CHECK(CodeOf([&] { ValidateGame(l, neg); }) == ErrorCode::kInvalidFeedback);

  LossMatrix nan = l;
  nan(1, 0) = std::nan("");
  CHECK_THROWS_AS(ValidateGame(nan, f), PmError);
}

TEST_CASE("catalog games load and unknown names fail") {
  for (const auto& name : CatalogNames()) {
    const Game g = CatalogGame(name);
    CHECK(g.name() == name);
  }
  CHECK(CodeOf([] { CatalogGame("no_such_game"); }) == ErrorCode::kUnknownCatalogName);
  const Game pricing = CatalogGame("dynamic_pricing_small");
  CHECK(pricing.k() == 3);
  CHECK(pricing.loss(1, 0) == doctest::Approx(0.75));
}

TEST_CASE("json round trip, flat and nested") {
  const Game g = CatalogGame("apple_tasting");
  const Game back = GameFromJson(GameToJson(g));
  CHECK(back.loss() == g.loss());
  CHECK(back.feedback() == g.feedback());

  nlohmann::json flat{{"k", 2}, {"d", 2}, {"loss", {0, 1, 1, 0}}, {"feedback", {0, 1, 1, 0}}};
  const Game f = GameFromJson(flat);
  CHECK(f.loss(0, 1) == 1.0);
  CHECK(f.symbol(1, 0) == 1);

  flat["colour"] = "red";
  CHECK_THROWS_AS(GameFromJson(flat), PmError);
}

TEST_CASE("file round trip and missing file") {
  const auto path = std::filesystem::temp_directory_path() / "pmbobw_game_rt.json";
  SaveGameFile(CatalogGame("bandit3"), path.string());
  CHECK(LoadGameFile(path.string()).loss() == CatalogGame("bandit3").loss());
  std::filesystem::remove(path);
  try {
    ResolveGame("/nonexistent/dir/game.json");
    FAIL("expected throw");
  } catch (const PmError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/game.json") != std::string::npos);
  }
}
