#include "pmbobw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <thread>

#include "pmbobw/environment.hpp"
#include "pmbobw/error.hpp"
#include "pmbobw/exobopt.hpp"
#include "pmbobw/ftrl.hpp"
#include "pmbobw/rng.hpp"

namespace pmbobw {

using nlohmann::json;

const char* VersionStamp() { return "pmbobw 0.1.0"; }

PreparedGame PrepareGame(const Game& game, Algorithm algorithm) {
  PreparedGame prepared{game, Classify(game), ComputeSymbolStats(game), std::nullopt};
  const GameClassTag tag = prepared.cls.tag;
  if (tag == GameClassTag::kTrivial) return prepared;
  if (tag == GameClassTag::kHopeless) {
    throw PmError(ErrorCode::kClassificationMismatch,
                  "game '" + game.name() + "' is hopeless; no algorithm applies");
  }
  if (algorithm == Algorithm::kBobwLocal) {
    if (tag != GameClassTag::kLocallyObservable) {
      throw PmError(ErrorCode::kClassificationMismatch,
                    "bobw_local needs a locally observable game, '" + game.name() +
                        "' is " + GameClassName(tag));
    }
    if (!prepared.cls.geometry.degenerate.empty()) {
      throw PmError(ErrorCode::kDegenerateGame,
                    "bobw_local refuses degenerate action " +
                        std::to_string(prepared.cls.geometry.degenerate.front()));
    }
    prepared.estimator = BuildGlobalEstimator(game, prepared.cls.geometry,
                                              prepared.cls.local_witnesses,
                                              ObservabilityMode::kLocal);
  } else {
    prepared.estimator = BuildGlobalEstimator(game, prepared.cls.geometry,
                                              prepared.cls.global_witnesses,
                                              ObservabilityMode::kGlobal);
  }
  return prepared;
}

ResolvedRates ResolveRates(const PreparedGame& prepared, const EpisodeSpec& spec) {
  ResolvedRates r;
  if (prepared.trivial()) return r;
  const double k = prepared.game.k();
  const double m = prepared.stats.m;
  const double k_pi = prepared.geometry().k_pi();
  const double log_t = std::log(static_cast<double>(std::max(spec.horizon, 2)));
  const double log_kpi = std::log(k_pi);
  const RateOverrides& o = spec.rates;
  switch (spec.algorithm) {
    case Algorithm::kBobwLocal:
      r.c1 = o.c1.value_or(m * std::pow(k, 1.5) * std::sqrt(log_t / log_kpi));
      r.lower_beta = o.lower_beta.value_or(2.0 * m * k * k);
      break;
    case Algorithm::kBobwGlobal: {
      const double cg = prepared.estimator->c_g;
      const double scale = cg * cg * log_t * std::log(k_pi * spec.horizon);
      r.c1 = o.c1.value_or(std::max({1.0, log_kpi, std::cbrt(scale)}));
      r.c2 = o.c2.value_or(std::sqrt(cg * cg * log_t));
      r.beta1 = o.beta1.value_or(std::max(r.c2, 2.0 * cg));
      r.gamma = o.gamma;
      break;
    }
    case Algorithm::kFixedRateBaseline: {
      const double t = spec.horizon;
      r.eta = o.eta.value_or(std::pow(t, -2.0 / 3.0));
      r.gamma = o.gamma.value_or(std::min(0.5, std::pow(t, -1.0 / 3.0)));
      break;
    }
  }
  return r;
}

double Lemma5Margin(double entropy_sum, double q_astar, int k_pi, int horizon) {
  if (q_astar <= 0.0) return -entropy_sum;
  const double bound =
      q_astar * std::log(std::numbers::e * k_pi * horizon / q_astar);
  return bound - entropy_sum;
}

std::vector<double> PseudoRegret(const RunTrace& trace, const Game& game,
                                 int* hindsight_action) {
  const int T = static_cast<int>(trace.actions.size());
  Eigen::VectorXd totals = Eigen::VectorXd::Zero(game.k());
  for (int t = 0; t < T; ++t) totals += game.loss().col(trace.outcomes[t]);
  int best = 0;
  for (int a = 1; a < game.k(); ++a) {
    if (totals(a) < totals(best)) best = a;
  }
  if (hindsight_action != nullptr) *hindsight_action = best;
  std::vector<double> curve(T);
  double cumulative = 0.0;
  for (int t = 0; t < T; ++t) {
    const int x = trace.outcomes[t];
    cumulative += game.loss(trace.actions[t], x) - game.loss(best, x);
    curve[t] = cumulative;
  }
  return curve;
}

double RealizedCorruption(const RunTrace& trace, const Game& game) {
  if (!trace.corrupted) {
    throw PmError(ErrorCode::kMissingPreCorruptionOutcomes,
                  "trace was not recorded in the corrupted regime");
  }
  return RealizedCorruption(game, trace.outcomes, trace.outcomes_pre);
}

namespace {

void Violation(const EpisodeSpec& spec, long& counter, const std::string& what,
               int t) {
  ++counter;
  if (spec.debug_asserts) {
    throw PmError(ErrorCode::kInvariantViolation,
                  what + " at round " + std::to_string(t));
  }
}

void FinalizeTrace(RunTrace& trace, const PreparedGame& prepared,
                   const EpisodeSpec& spec) {
  const int T = trace.horizon;
  trace.regret_curve = PseudoRegret(trace, prepared.game, &trace.hindsight_action);
  trace.q_astar_curve.resize(T);
  double q_astar = 0.0;
  trace.entropy_sum = 0.0;
  for (int t = 1; t <= T; ++t) {
    q_astar += 1.0 - trace.QAt(t)(trace.hindsight_action);
    trace.q_astar_curve[t - 1] = q_astar;
    trace.entropy_sum += trace.entropy[t - 1];
  }
  trace.lemma5_margin =
      Lemma5Margin(trace.entropy_sum, q_astar, std::max(1, trace.k_pi), T);
  if (q_astar > 0.0 && trace.lemma5_margin < 0.0) {
    Violation(spec, trace.invariants.lemma5, "entropy bound violated", T);
  }
  if (trace.corrupted) trace.realized_corruption = RealizedCorruption(trace, prepared.game);
}

}  // namespace

RunTrace RunEpisode(const PreparedGame& prepared, const EpisodeSpec& spec,
                    std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const Game& game = prepared.game;
  const GameGeometry& geom = prepared.geometry();
  const int k = game.k();
  const int T = spec.horizon;
  const int m = prepared.stats.m;

  RunTrace trace;
  trace.algorithm = spec.algorithm;
  trace.seed = seed;
  trace.horizon = T;
  trace.k = k;
  trace.k_pi = geom.k_pi();
  trace.corrupted = spec.environment.kind == RegimeKind::kCorrupted;
  trace.corruption_budget = spec.environment.budget;
  trace.actions.reserve(T);
  trace.outcomes.reserve(T);
  trace.outcomes_pre.reserve(T);
  trace.symbols.reserve(T);
  trace.losses.reserve(T);
  trace.q.reserve(static_cast<std::size_t>(T) * k);
  trace.p.reserve(static_cast<std::size_t>(T) * k);
  trace.entropy.reserve(T);

  Environment env(game, geom, spec.environment, seed, T);
  std::optional<int> reference_action;
  if (spec.environment.has_distribution()) {
    reference_action = ComputeGapProfile(game, spec.environment.nu).a_star;
  }
  const ResolvedRates rates = ResolveRates(prepared, spec);

  Eigen::VectorXd cumulative = Eigen::VectorXd::Zero(k);
  std::optional<LocalRateSchedule> local_rate;
  std::optional<GlobalRateSchedule> global_rate;
  std::optional<OptSolution> last_solution;
  std::optional<ExoProblem> problem;

  if (!prepared.trivial()) {
    if (spec.algorithm == Algorithm::kBobwLocal) {
      local_rate.emplace(rates.c1, rates.lower_beta, geom.k_pi());
      problem.emplace();
      problem->game = &game;
      problem->pareto = geom.pareto;
      trace.has_v_prime = true;
      trace.solve_every_deviation = spec.solver.solve_every > 1;
    } else if (spec.algorithm == Algorithm::kBobwGlobal) {
      global_rate.emplace(rates.c1, rates.c2, prepared.estimator->c_g, rates.beta1);
      trace.has_gamma = true;
    } else {
      trace.has_gamma = true;
    }
    trace.has_rate = true;
  }
  const double eta_cap = 1.0 / (2.0 * m * k * k);

  for (int t = 1; t <= T; ++t) {
    const OutcomeDraw draw = env.Draw(t, trace.actions);

    Eigen::VectorXd q;
    Eigen::VectorXd p;
    const EstimatorTable* table = nullptr;
    double rate_value = 0.0;
    double gamma = 0.0;
    double v_prime = 0.0;

    if (prepared.trivial()) {
      q = Eigen::VectorXd::Zero(k);
      q(geom.pareto.front()) = 1.0;
      p = q;
    } else if (local_rate) {
      const double eta = local_rate->eta();
      rate_value = eta;
      q = ComputeQ(cumulative, geom.pareto, eta);
      problem->q = q;
      problem->eta = eta;
      if (!last_solution || (t - 1) % spec.solver.solve_every == 0) {
        last_solution = SolveExo(*problem, prepared.estimator->table, m,
                                 spec.solver.options,
                                 last_solution ? &*last_solution : nullptr);
        trace.solver_eps.push_back(last_solution->eps_achieved);
        trace.solver_iterations.push_back(last_solution->iterations);
      } else {
        last_solution->p = ProjectRestrictedSimplex(last_solution->p, q);
        trace.solver_eps.push_back(last_solution->eps_achieved);
        trace.solver_iterations.push_back(0);
      }
      p = last_solution->p;
      table = &last_solution->g;
      v_prime = last_solution->v_prime;
      if (eta > eta_cap * (1.0 + 1e-12)) {
        Violation(spec, trace.invariants.eta_bound, "eta above 1/(2mk^2)", t);
      }
      for (int a = 0; a < k; ++a) {
        if (p(a) < q(a) / (2.0 * k) - 1e-12) {
          Violation(spec, trace.invariants.restricted_simplex,
                    "p below q/(2k)", t);
          break;
        }
      }
      if (v_prime < 0.0) {
        Violation(spec, trace.invariants.v_prime_negative, "negative V'", t);
      }
    } else {
      double eta;
      if (global_rate) {
        eta = 1.0 / global_rate->beta();
        q = ComputeQ(cumulative, geom.pareto, eta);
        double max_q = 0.0;
        for (int a : geom.pareto) max_q = std::max(max_q, q(a));
        const GlobalRateStep step = global_rate->Step(ShannonEntropy(q), 1.0 - max_q);
        rate_value = step.beta;
        gamma = rates.gamma.value_or(step.gamma);
        if (step.beta_next < step.beta) {
          Violation(spec, trace.invariants.beta_decrease, "beta decreased", t);
        }
      } else {
        eta = rates.eta;
        rate_value = 1.0 / eta;
        q = ComputeQ(cumulative, geom.pareto, eta);
        gamma = *rates.gamma;
      }
      p = MixExploration(q, gamma);
      table = &prepared.estimator->table;
      if (gamma > 0.5 + 1e-12) {
        Violation(spec, trace.invariants.gamma_bound, "gamma above 1/2", t);
      }
      if (p.minCoeff() < gamma / k - 1e-15) {
        Violation(spec, trace.invariants.exploration_floor, "p below gamma/k", t);
      }
    }

    const int action = SampleIndex(
        p, CounterUniform(seed, RngStream::kLearner, static_cast<std::uint64_t>(t)));
    const int symbol = game.symbol(action, draw.outcome);
    if (table != nullptr) {
      cumulative += LossEstimate(*table, action, symbol, p(action));
    }
    const double entropy = ShannonEntropy(q);
    if (local_rate) local_rate->Step(entropy);

    trace.actions.push_back(action);
    trace.outcomes.push_back(draw.outcome);
    trace.outcomes_pre.push_back(draw.outcome_pre);
    trace.symbols.push_back(symbol);
    trace.losses.push_back(game.loss(action, draw.outcome));
    trace.q.insert(trace.q.end(), q.data(), q.data() + k);
    trace.p.insert(trace.p.end(), p.data(), p.data() + k);
    trace.entropy.push_back(entropy);
    trace.rate.push_back(rate_value);
    trace.gamma.push_back(gamma);
    trace.v_prime.push_back(v_prime);
    if (reference_action) {
      const Eigen::VectorXd nu = env.DistributionAt(t);
      trace.expected_regret_increment.push_back(
          (game.loss().row(action) - game.loss().row(*reference_action)).dot(nu));
    }
  }

  FinalizeTrace(trace, prepared, spec);
  trace.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

std::vector<RunTrace> RunSeeds(const PreparedGame& prepared, const EpisodeSpec& spec,
                               const std::vector<std::uint64_t>& seeds, int threads) {
  std::vector<RunTrace> traces(seeds.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(seeds.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      traces[i] = RunEpisode(prepared, spec, seeds[i]);
    }
    return traces;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(seeds.size());
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < seeds.size(); i = next++) {
        try {
          traces[i] = RunEpisode(prepared, spec, seeds[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

BoundOverlay TheoreticalBounds(BoundFamily family, int m, int k, int k_pi,
                               double c_g, const BoundInputs& inputs) {
  if (inputs.delta_min && !(*inputs.delta_min > 0.0)) {
    throw PmError(ErrorCode::kInvalidArgument, "delta_min must be positive");
  }
  if (inputs.corruption < 0.0) {
    throw PmError(ErrorCode::kInvalidArgument, "corruption must be >= 0");
  }
  const double T = inputs.horizon;
  const double log_t = std::log(T);
  const double log_kpi_t = std::log(static_cast<double>(k_pi) * T);
  BoundOverlay out;
  if (family == BoundFamily::kLocal) {
    out.adversarial = m * std::pow(static_cast<double>(k), 1.5) *
                      std::sqrt(T * log_t * std::log(static_cast<double>(k_pi)));
    if (inputs.delta_min) {
      const double base = static_cast<double>(m) * m * std::pow(k, 4.0) * log_t *
                          log_kpi_t / *inputs.delta_min;
      out.stochastic = base + std::sqrt(inputs.corruption * base);
    }
  } else {
    const double scale = c_g * c_g * log_t * log_kpi_t;
    out.adversarial = std::cbrt(scale) * std::pow(T, 2.0 / 3.0);
    if (inputs.delta_min) {
      const double base = scale / (*inputs.delta_min * *inputs.delta_min);
      out.stochastic = base + std::cbrt(inputs.corruption * inputs.corruption * base);
    }
  }
  return out;
}

std::vector<int> TraceCheckpoints(int horizon) {
  std::vector<int> points;
  const int stride = (horizon + 999) / 1000;
  for (int t = 1; t <= horizon; ++t) {
    if (t <= 1000 || t % stride == 0 || t == horizon) points.push_back(t);
  }
  return points;
}

RunSummary SummarizeTrace(const RunTrace& trace) {
  RunSummary s;
  s.seed = trace.seed;
  s.horizon = trace.horizon;
  s.final_regret = trace.regret_curve.empty() ? 0.0 : trace.regret_curve.back();
  if (!trace.expected_regret_increment.empty()) {
    double total = 0.0;
    for (double v : trace.expected_regret_increment) total += v;
    s.expected_regret = total;
  }
  s.hindsight_action = trace.hindsight_action;
  s.q_astar = trace.q_astar_curve.empty() ? 0.0 : trace.q_astar_curve.back();
  s.entropy_sum = trace.entropy_sum;
  s.lemma5_margin = trace.lemma5_margin;
  s.realized_corruption = trace.realized_corruption;
  s.corruption_budget = trace.corruption_budget;
  s.wall_time_seconds = trace.wall_time_seconds;
  s.invariants = trace.invariants;
  for (int t : TraceCheckpoints(trace.horizon)) {
    s.curve.emplace_back(t, trace.regret_curve[t - 1]);
  }
  return s;
}

namespace {

std::pair<double, double> MeanStd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double denom = v.size() > 1 ? static_cast<double>(v.size() - 1) : 1.0;
  return {mean, std::sqrt(var / denom)};
}

}  // namespace

AggregateSummary Summarize(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw PmError(ErrorCode::kEmptyInput, "no traces to summarize");
  AggregateSummary agg;
  for (const auto& t : traces) agg.runs.push_back(SummarizeTrace(t));
  const int horizon = traces.front().horizon;
  for (const auto& t : traces) {
    if (t.horizon != horizon) {
      throw PmError(ErrorCode::kInvalidArgument, "traces have different horizons");
    }
  }
  agg.checkpoints = TraceCheckpoints(horizon);
  for (int t : agg.checkpoints) {
    std::vector<double> values;
    for (const auto& tr : traces) values.push_back(tr.regret_curve[t - 1]);
    const auto [mean, sd] = MeanStd(values);
    agg.mean_curve.push_back(mean);
    agg.std_curve.push_back(sd);
  }
  std::vector<double> finals;
  std::vector<double> expected;
  agg.min_lemma5_margin = std::numeric_limits<double>::infinity();
  for (const auto& r : agg.runs) {
    finals.push_back(r.final_regret);
    if (r.expected_regret) expected.push_back(*r.expected_regret);
    agg.invariant_violations += r.invariants.total();
    if (r.q_astar > 0.0) agg.min_lemma5_margin = std::min(agg.min_lemma5_margin, r.lemma5_margin);
  }
  std::tie(agg.mean_final, agg.std_final) = MeanStd(finals);
  if (expected.size() == finals.size()) {
    const auto [mean, sd] = MeanStd(expected);
    agg.mean_expected = mean;
    agg.std_expected = sd;
  }
  return agg;
}

namespace {

void AppendDouble(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string TraceCsv(const RunTrace& trace) {
  std::string out =
      "t,action,outcome,outcome_pre,symbol,loss,regret_cum,q_astar,entropy,"
      "eta_or_beta,gamma,v_prime\n";
  for (int t : TraceCheckpoints(trace.horizon)) {
    const int i = t - 1;
    out += std::to_string(t);
    out += ',' + std::to_string(trace.actions[i]);
    out += ',' + std::to_string(trace.outcomes[i]);
    out += ',' + std::to_string(trace.outcomes_pre[i]);
    out += ',' + std::to_string(trace.symbols[i]);
    out += ',';
    AppendDouble(out, trace.losses[i]);
    out += ',';
    AppendDouble(out, trace.regret_curve[i]);
    out += ',';
    AppendDouble(out, trace.q_astar_curve[i]);
    out += ',';
    AppendDouble(out, trace.entropy[i]);
    out += ',';
    if (trace.has_rate) AppendDouble(out, trace.rate[i]);
    out += ',';
    if (trace.has_gamma) AppendDouble(out, trace.gamma[i]);
    out += ',';
    if (trace.has_v_prime) AppendDouble(out, trace.v_prime[i]);
    out += '\n';
  }
  return out;
}

void WriteTraceCsv(const RunTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PmError(ErrorCode::kIoError, "cannot write " + path);
  out << TraceCsv(trace);
}

namespace {

json InvariantsToJson(const InvariantReport& inv) {
  return json{{"restricted_simplex", inv.restricted_simplex},
              {"eta_bound", inv.eta_bound},
              {"v_prime_negative", inv.v_prime_negative},
              {"gamma_bound", inv.gamma_bound},
              {"exploration_floor", inv.exploration_floor},
              {"beta_decrease", inv.beta_decrease},
              {"lemma5", inv.lemma5}};
}

}  // namespace

json SummaryToJson(const AggregateSummary& summary) {
  json runs = json::array();
  for (const auto& r : summary.runs) {
    json run{{"seed", r.seed},
             {"horizon", r.horizon},
             {"final_regret", r.final_regret},
             {"hindsight_action", r.hindsight_action},
             {"q_astar", r.q_astar},
             {"entropy_sum", r.entropy_sum},
             {"lemma5_margin", r.lemma5_margin},
             {"realized_corruption", r.realized_corruption},
             {"corruption_budget", r.corruption_budget},
             {"wall_time_seconds", r.wall_time_seconds},
             {"invariant_violations", InvariantsToJson(r.invariants)}};
    if (r.expected_regret) run["expected_regret"] = *r.expected_regret;
    json curve = json::array();
    for (const auto& [t, v] : r.curve) {
      if (t == r.horizon || t % std::max(1, r.horizon / 100) == 0) curve.push_back({t, v});
    }
    run["regret_curve"] = std::move(curve);
    runs.push_back(std::move(run));
  }
  json doc{{"runs", std::move(runs)},
           {"mean_final_regret", summary.mean_final},
           {"std_final_regret", summary.std_final},
           {"invariant_violations", summary.invariant_violations},
           {"version", VersionStamp()}};
  if (std::isfinite(summary.min_lemma5_margin)) {
    doc["min_lemma5_margin"] = summary.min_lemma5_margin;
  }
  if (summary.mean_expected) {
    doc["mean_expected_regret"] = *summary.mean_expected;
    doc["std_expected_regret"] = *summary.std_expected;
  }
  return doc;
}

void WriteCurveCsv(const AggregateSummary& summary, const std::string& path,
                   const std::vector<double>& overlay) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PmError(ErrorCode::kIoError, "cannot write " + path);
  out << "t,mean_regret,std_regret" << (overlay.empty() ? "" : ",overlay") << '\n';
  std::string line;
  for (std::size_t i = 0; i < summary.checkpoints.size(); ++i) {
    line = std::to_string(summary.checkpoints[i]) + ',';
    AppendDouble(line, summary.mean_curve[i]);
    line += ',';
    AppendDouble(line, summary.std_curve[i]);
    if (!overlay.empty()) {
      line += ',';
      AppendDouble(line, overlay[i]);
    }
    out << line << '\n';
  }
}

}  // namespace pmbobw
