#include "pmbobw/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pmbobw/error.hpp"

namespace pmbobw {

using nlohmann::json;

const char* AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBobwLocal: return "bobw_local";
    case Algorithm::kBobwGlobal: return "bobw_global";
    case Algorithm::kFixedRateBaseline: return "fixed_rate_baseline";
  }
  return "?";
}

void ApplyOverride(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw PmError(ErrorCode::kInvalidConfig,
                  "override must look like key=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i])) (*node)[parts[i]] = json::object();
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = value;
}

namespace {

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) {
    throw PmError(ErrorCode::kInvalidConfig, where + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw PmError(ErrorCode::kInvalidConfig,
                    "unknown key '" + key + "' in " + where);
    }
  }
}

std::optional<double> OptionalNumber(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return obj.at(key).get<double>();
}

}  // namespace

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto dash = item.find('-');
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    }
  } catch (const std::exception&) {
    throw PmError(ErrorCode::kInvalidConfig, "bad seed list '" + text + "'");
  }
  if (seeds.empty()) throw PmError(ErrorCode::kInvalidConfig, "empty seed list");
  return seeds;
}

RunConfig ParseRunConfig(const json& doc, const std::string& base_dir) {
  CheckKeys(doc,
            {"game", "algorithm", "horizon", "environment", "seeds", "rates",
             "solver", "output", "sweep", "debug_asserts"},
            "config");
  RunConfig cfg;
  cfg.source = doc;
  try {
    if (!doc.contains("game")) {
      throw PmError(ErrorCode::kInvalidConfig, "config is missing 'game'");
    }
    const json& game = doc.at("game");
    if (game.is_string()) {
      std::string ref = game.get<std::string>();
      const auto rel = std::filesystem::path(base_dir) / ref;
      if (!std::filesystem::exists(ref) && std::filesystem::exists(rel)) {
        ref = rel.string();
      }
      cfg.game = ResolveGame(ref);
    } else {
      cfg.game = GameFromJson(game);
    }

    const std::string algorithm = doc.value("algorithm", std::string("bobw_local"));
    if (algorithm == "bobw_local") {
      cfg.episode.algorithm = Algorithm::kBobwLocal;
    } else if (algorithm == "bobw_global") {
      cfg.episode.algorithm = Algorithm::kBobwGlobal;
    } else if (algorithm == "fixed_rate_baseline") {
      cfg.episode.algorithm = Algorithm::kFixedRateBaseline;
    } else {
      throw PmError(ErrorCode::kInvalidConfig, "unknown algorithm '" + algorithm + "'");
    }

    cfg.episode.horizon = doc.value("horizon", 1000);
    if (cfg.episode.horizon < 1) {
      throw PmError(ErrorCode::kInvalidConfig, "horizon must be >= 1");
    }

    if (doc.contains("environment")) {
      cfg.episode.environment = EnvironmentSpecFromJson(doc.at("environment"), *cfg.game);
    } else {
      cfg.episode.environment.kind = RegimeKind::kStochastic;
      cfg.episode.environment.nu =
          Eigen::VectorXd::Constant(cfg.game->d(), 1.0 / cfg.game->d());
    }

    if (doc.contains("seeds")) {
      const json& seeds = doc.at("seeds");
      if (seeds.is_string()) {
        cfg.seeds = ParseSeedList(seeds.get<std::string>());
      } else if (seeds.is_number_integer()) {
        const int n = seeds.get<int>();
        if (n < 1) throw PmError(ErrorCode::kInvalidConfig, "seed count must be >= 1");
        cfg.seeds.clear();
        for (int s = 1; s <= n; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
      } else {
        cfg.seeds = seeds.get<std::vector<std::uint64_t>>();
        if (cfg.seeds.empty()) throw PmError(ErrorCode::kInvalidConfig, "empty seed list");
      }
    }

    if (doc.contains("rates")) {
      const json& r = doc.at("rates");
      CheckKeys(r, {"c1", "c2", "B", "beta1", "eta", "gamma"}, "rates");
      cfg.episode.rates.c1 = OptionalNumber(r, "c1");
      cfg.episode.rates.c2 = OptionalNumber(r, "c2");
      cfg.episode.rates.lower_beta = OptionalNumber(r, "B");
      cfg.episode.rates.beta1 = OptionalNumber(r, "beta1");
      cfg.episode.rates.eta = OptionalNumber(r, "eta");
      cfg.episode.rates.gamma = OptionalNumber(r, "gamma");
    }

    if (doc.contains("solver")) {
      const json& s = doc.at("solver");
      CheckKeys(s, {"budget", "step_scale", "solve_every"}, "solver");
      auto& opts = cfg.episode.solver;
      opts.options.budget = s.value("budget", opts.options.budget);
      opts.options.step_scale = s.value("step_scale", opts.options.step_scale);
      opts.solve_every = s.value("solve_every", opts.solve_every);
      if (opts.options.budget < 0 || opts.solve_every < 1 ||
          !(opts.options.step_scale > 0.0)) {
        throw PmError(ErrorCode::kInvalidConfig, "bad solver settings");
      }
    }

    if (doc.contains("output")) {
      const json& o = doc.at("output");
      CheckKeys(o, {"dir", "traces"}, "output");
      cfg.out_dir = o.value("dir", cfg.out_dir);
      cfg.write_traces = o.value("traces", cfg.write_traces);
    }

    if (doc.contains("sweep")) {
      const json& s = doc.at("sweep");
      CheckKeys(s, {"horizons", "budgets"}, "sweep");
      SweepSpec sweep;
      if (s.contains("horizons")) sweep.horizons = s.at("horizons").get<std::vector<int>>();
      if (s.contains("budgets")) sweep.budgets = s.at("budgets").get<std::vector<double>>();
      if (sweep.horizons.empty() == sweep.budgets.empty()) {
        throw PmError(ErrorCode::kInvalidConfig,
                      "sweep needs exactly one of 'horizons' or 'budgets'");
      }
      if (!sweep.budgets.empty() &&
          cfg.episode.environment.kind != RegimeKind::kCorrupted) {
        throw PmError(ErrorCode::kInvalidConfig,
                      "budget sweeps need a corrupted environment");
      }
      cfg.sweep = std::move(sweep);
    }
    cfg.episode.debug_asserts = doc.value("debug_asserts", false);
  } catch (const json::exception& e) {
    throw PmError(ErrorCode::kInvalidConfig, e.what());
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path,
                        const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw PmError(ErrorCode::kIoError, "cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw PmError(ErrorCode::kInvalidConfig, path + ": " + e.what());
  }
  for (const auto& o : overrides) ApplyOverride(doc, o);
  return ParseRunConfig(doc, std::filesystem::path(path).parent_path().string());
}

}  // namespace pmbobw
