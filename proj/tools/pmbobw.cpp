// Command-line front end: classify, verify, run, sweep, bench, catalog.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmbobw/config.hpp"
#include "pmbobw/environment.hpp"
#include "pmbobw/error.hpp"
#include "pmbobw/estimation.hpp"
#include "pmbobw/game.hpp"
#include "pmbobw/geometry.hpp"
#include "pmbobw/harness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pmbobw;

namespace {

constexpr double kReplayTolerance = 1e-9;

struct RunFlags {
  std::string seeds;
  int threads = 0;
  std::string out_dir;
  bool debug_asserts = false;
  std::vector<std::string> overrides;
};

void AddRunFlags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--seeds", flags.seeds, "seed list, e.g. 1-20 or 1,4,9");
  cmd->add_option("--threads", flags.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out-dir", flags.out_dir, "output directory");
  cmd->add_flag("--debug-asserts", flags.debug_asserts,
                "abort on the first invariant violation");
  cmd->add_option("--override", flags.overrides, "config override key=value")
      ->allow_extra_args(false);
}

int ThreadCount(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

RunConfig LoadWithFlags(const std::string& path, const RunFlags& flags) {
  RunConfig cfg = LoadRunConfig(path, flags.overrides);
  if (!flags.seeds.empty()) cfg.seeds = ParseSeedList(flags.seeds);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (flags.debug_asserts) cfg.episode.debug_asserts = true;
  if (!cfg.game) throw PmError(ErrorCode::kInvalidConfig, "config has no game");
  return cfg;
}

// Constants-1 overlay evaluated at every checkpoint of the curve.
std::vector<double> CurveOverlay(const PreparedGame& prepared, const EpisodeSpec& spec,
                                 const std::vector<int>& checkpoints) {
  if (prepared.trivial()) return {};
  const BoundFamily family = spec.algorithm == Algorithm::kBobwLocal
                                 ? BoundFamily::kLocal
                                 : BoundFamily::kGlobal;
  std::vector<double> out;
  out.reserve(checkpoints.size());
  for (int t : checkpoints) {
    BoundInputs in;
    in.horizon = t;
    const BoundOverlay b =
        TheoreticalBounds(family, prepared.stats.m, prepared.game.k(),
                          std::max(2, prepared.geometry().k_pi()),
                          prepared.estimator->c_g, in);
    out.push_back(b.adversarial);
  }
  return out;
}

json OverlayJson(const PreparedGame& prepared, const EpisodeSpec& spec,
                 double corruption) {
  if (prepared.trivial()) return nullptr;
  BoundInputs in;
  in.horizon = spec.horizon;
  in.corruption = corruption;
  if (spec.environment.has_distribution()) {
    const GapProfile gp = ComputeGapProfile(prepared.game, spec.environment.nu);
    if (gp.unique && gp.delta_min > 0.0) in.delta_min = gp.delta_min;
  }
  const BoundFamily family = spec.algorithm == Algorithm::kBobwLocal
                                 ? BoundFamily::kLocal
                                 : BoundFamily::kGlobal;
  const BoundOverlay b =
      TheoreticalBounds(family, prepared.stats.m, prepared.game.k(),
                        std::max(2, prepared.geometry().k_pi()),
                        prepared.estimator->c_g, in);
  json out{{"label", "shape overlay, constants = 1"}, {"adversarial", b.adversarial}};
  if (b.stochastic) out["stochastic"] = *b.stochastic;
  return out;
}

json RunPoint(const PreparedGame& prepared, const RunConfig& cfg,
              const EpisodeSpec& spec, const fs::path& dir, int threads) {
  fs::create_directories(dir);
  const auto start = std::chrono::steady_clock::now();
  const std::vector<RunTrace> traces = RunSeeds(prepared, spec, cfg.seeds, threads);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (cfg.write_traces) {
    for (const RunTrace& t : traces) {
      WriteTraceCsv(t, (dir / ("trace_seed" + std::to_string(t.seed) + ".csv")).string());
    }
  }
  const AggregateSummary agg = Summarize(traces);
  WriteCurveCsv(agg, (dir / "curve.csv").string(),
                CurveOverlay(prepared, spec, agg.checkpoints));
  json summary = SummaryToJson(agg);
  summary["algorithm"] = AlgorithmName(spec.algorithm);
  summary["class"] = GameClassName(prepared.cls.tag);
  summary["horizon"] = spec.horizon;
  double corruption = 0.0;
  for (const auto& r : agg.runs) corruption = std::max(corruption, r.realized_corruption);
  summary["overlay"] = OverlayJson(prepared, spec, corruption);
  summary["solve_every"] = spec.solver.solve_every;
  if (spec.solver.solve_every > 1 && spec.algorithm == Algorithm::kBobwLocal) {
    summary["deviation"] = "solve_every > 1 reuses (p, G) across rounds";
  }
  summary["wall_time_seconds"] = wall;
  summary["config"] = cfg.source;
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  return summary;
}

int CmdClassify(const std::string& ref) {
  const Game game = ResolveGame(ref);
  const GameClass cls = Classify(game);
  std::cout << ClassReport(game, cls).dump(2) << '\n';
  return 0;
}

int CmdVerify(const std::string& ref) {
  const Game game = ResolveGame(ref);
  const GameClass cls = Classify(game);
  double witness_max = 0.0;
  bool support_ok = true;
  for (const auto& [edge, w] : cls.global_witnesses) {
    witness_max = std::max(witness_max, WitnessResidual(game, edge, w));
  }
  for (const auto& [edge, w] : cls.local_witnesses) {
    witness_max = std::max(witness_max, WitnessResidual(game, edge, w));
    for (int c = 0; c < game.k(); ++c) {
      if (c != edge.a && c != edge.b && w.row(c).cwiseAbs().maxCoeff() > 0.0) {
        support_ok = false;
      }
    }
  }
  json report{{"game", game.name()},
              {"class", GameClassName(cls.tag)},
              {"witness_max_residual", witness_max},
              {"local_support_ok", support_ok}};
  bool ok = support_ok && witness_max < kReplayTolerance;
  if (!cls.global_witnesses.empty()) {
    const GlobalEstimator est = BuildGlobalEstimator(
        game, cls.geometry, cls.global_witnesses, ObservabilityMode::kGlobal);
    const double residual = VerifyEstimator(game, cls.geometry, est.table);
    report["estimator_max_residual"] = residual;
    report["c_G"] = est.c_g;
    ok = ok && residual < kReplayTolerance;
  }
  report["ok"] = ok;
  std::cout << report.dump(2) << '\n';
  if (!ok) {
    std::cerr << "verify: residual above " << kReplayTolerance << '\n';
    return 2;
  }
  return 0;
}

int CmdRun(const std::string& path, const RunFlags& flags) {
  const RunConfig cfg = LoadWithFlags(path, flags);
  const PreparedGame prepared = PrepareGame(*cfg.game, cfg.episode.algorithm);
  const json summary = RunPoint(prepared, cfg, cfg.episode, cfg.out_dir,
                                ThreadCount(flags.threads));
  std::cout << "mean_final_regret " << summary["mean_final_regret"].get<double>()
            << " std " << summary["std_final_regret"].get<double>()
            << " violations " << summary["invariant_violations"].get<long>() << '\n';
  return 0;
}

int CmdSweep(const std::string& path, const RunFlags& flags) {
  RunConfig cfg = LoadWithFlags(path, flags);
  if (!cfg.sweep) throw PmError(ErrorCode::kInvalidConfig, "config has no sweep section");
  const PreparedGame prepared = PrepareGame(*cfg.game, cfg.episode.algorithm);
  const int threads = ThreadCount(flags.threads);
  const bool by_horizon = !cfg.sweep->horizons.empty();
  fs::create_directories(cfg.out_dir);
  std::ofstream table(fs::path(cfg.out_dir) / "sweep.csv");
  table << (by_horizon ? "horizon" : "budget")
        << ",mean_regret,std_regret,mean_expected_regret,violations\n";
  const std::size_t n = by_horizon ? cfg.sweep->horizons.size() : cfg.sweep->budgets.size();
  for (std::size_t i = 0; i < n; ++i) {
    EpisodeSpec spec = cfg.episode;
    std::string label;
    if (by_horizon) {
      spec.horizon = cfg.sweep->horizons[i];
      label = "T" + std::to_string(spec.horizon);
    } else {
      spec.environment.budget = cfg.sweep->budgets[i];
      label = "C" + std::to_string(static_cast<long long>(spec.environment.budget));
    }
    const json s = RunPoint(prepared, cfg, spec, fs::path(cfg.out_dir) / label, threads);
    char line[256];
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,",
                  by_horizon ? static_cast<double>(spec.horizon) : spec.environment.budget,
                  s["mean_final_regret"].get<double>(), s["std_final_regret"].get<double>());
    table << line;
    if (s.contains("mean_expected_regret")) {
      std::snprintf(line, sizeof(line), "%.17g", s["mean_expected_regret"].get<double>());
      table << line;
    }
    table << ',' << s["invariant_violations"].get<long>();
    table << '\n';
    std::cout << label << ' ' << s["mean_final_regret"].get<double>() << '\n';
  }
  return 0;
}

int CmdBench(const std::string& game_ref, const std::string& algorithm, int horizon) {
  json doc{{"game", game_ref},
           {"algorithm", algorithm},
           {"horizon", horizon},
           {"environment", {{"type", "adversarial"}, {"generator", "cell_switching"}}},
           {"output", {{"traces", false}}}};
  const RunConfig cfg = ParseRunConfig(doc);
  const PreparedGame prepared = PrepareGame(*cfg.game, cfg.episode.algorithm);
  const RunTrace trace = RunEpisode(prepared, cfg.episode, 1);
  const double per_round = trace.wall_time_seconds / horizon;
  std::printf("%s %s T=%d  %.3f s total  %.2f us/round\n", game_ref.c_str(),
              algorithm.c_str(), horizon, trace.wall_time_seconds, per_round * 1e6);
  return 0;
}

int CmdCatalog(const std::string& export_dir) {
  for (const std::string& name : CatalogNames()) {
    std::cout << name << '\n';
    if (!export_dir.empty()) {
      fs::create_directories(export_dir);
      SaveGameFile(CatalogGame(name), (fs::path(export_dir) / (name + ".json")).string());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partial monitoring best-of-both-worlds harness"};
  app.require_subcommand(1);

  std::string game_ref;
  auto* classify = app.add_subcommand("classify", "print the game class report");
  classify->add_option("game", game_ref, "game file or catalog name")->required();

  auto* verify = app.add_subcommand("verify", "replay witnesses and the estimator identity");
  verify->add_option("game", game_ref, "game file or catalog name")->required();

  std::string config_path;
  RunFlags flags;
  auto* run = app.add_subcommand("run", "run episodes from a config");
  run->add_option("config", config_path)->required();
  AddRunFlags(run, flags);

  auto* sweep = app.add_subcommand("sweep", "grid over horizons or corruption budgets");
  sweep->add_option("config", config_path)->required();
  AddRunFlags(sweep, flags);

  std::string bench_game = "bandit2";
  std::string bench_algorithm = "bobw_local";
  int bench_horizon = 2000;
  auto* bench = app.add_subcommand("bench", "time the per-round loop");
  bench->add_option("--game", bench_game);
  bench->add_option("--algorithm", bench_algorithm);
  bench->add_option("--horizon", bench_horizon);

  std::string export_dir;
  auto* catalog = app.add_subcommand("catalog", "list catalog games");
  catalog->add_option("--export", export_dir, "write each game as JSON into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*classify) return CmdClassify(game_ref);
    if (*verify) return CmdVerify(game_ref);
    if (*run) return CmdRun(config_path, flags);
    if (*sweep) return CmdSweep(config_path, flags);
    if (*bench) return CmdBench(bench_game, bench_algorithm, bench_horizon);
    if (*catalog) return CmdCatalog(export_dir);
  } catch (const PmError& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << '\n';
    return IsNumericError(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
