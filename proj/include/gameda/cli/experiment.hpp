#pragma once

// Builds an experiment from a config, runs the trials on a worker pool and
// writes the CSV series, the per-trial table and the summary.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gameda/analysis.hpp"
#include "gameda/cli/config.hpp"
#include "gameda/cli/game_document.hpp"
#include "gameda/engine.hpp"
#include "gameda/games.hpp"
#include "gameda/regularizer.hpp"

namespace gameda::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericAbort = 3, kAssertionFailed = 4 };

// Everything a trial needs, resolved before the first trial starts. Immutable afterwards.
struct Experiment {
  ExperimentConfig config;
  GamePtr game;
  ProductRegularizer regularizer;
  StepPolicy policy = StepPolicy::constant(1.0);
  NoiseModel noise = NoiseModel::none();
  Vector initial_scores;
  std::vector<Vector> candidates;
  std::vector<long> checkpoints;

  double k = 0.0;
  double omega = 0.0;
  double v_star = 0.0;
  std::optional<double> f1;                // F(X*, Y_1)
  std::optional<double> strong_stability;  // L
  std::vector<double> bound_gap_ergodic;   // per checkpoint; NaN when undefined
  std::optional<double> bound_length;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& key, const std::string& what) {
  throw ConfigError("field '" + key + "': " + what);
}

inline Vector to_vector(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[k];
  return out;
}

inline Vector broadcast(const std::vector<double>& v, int n, const std::string& key) {
  if (v.size() == 1) return Vector::Constant(n, v[0]);
  if (static_cast<int>(v.size()) != n)
    config_fail(key, "expected 1 or " + std::to_string(n) + " values, got " + std::to_string(v.size()));
  return to_vector(v);
}

inline GamePtr build_game(const ExperimentConfig& c) {
  try {
    if (c.game_kind == "cournot") {
      const int n = c.players;
      return std::make_shared<CournotGame>(c.a, broadcast(c.b, n, "game.b"), broadcast(c.c, n, "game.c"),
                                           broadcast(c.capacity, n, "game.capacity"));
    }
    if (c.game_kind == "bilinear") {
      Matrix a(static_cast<Eigen::Index>(c.matrix.size()), static_cast<Eigen::Index>(c.matrix.front().size()));
      for (std::size_t r = 0; r < c.matrix.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = to_vector(c.matrix[r]);
      if (c.sets == "simplex") return std::make_shared<BilinearZeroSumGame>(BilinearZeroSumGame::matrix_game(a));
      return std::make_shared<BilinearZeroSumGame>(a, ConvexSet::box(static_cast<int>(a.rows()), c.box[0], c.box[1]),
                                                   ConvexSet::box(static_cast<int>(a.cols()), c.box[0], c.box[1]));
    }
    if (c.game_kind == "nonconcave") return std::make_shared<NonConcaveStableGame>(c.dim);
  } catch (const ConfigError&) {
    throw;
  } catch (const UsageError& e) {
    config_fail("game." + c.game_kind, e.what());
  }
  namespace fs = std::filesystem;
  fs::path doc(c.document);
  if (doc.is_relative() && !c.base_dir.empty()) doc = fs::path(c.base_dir) / doc;
  if (!fs::exists(doc)) config_fail("game.document", "game document '" + doc.string() + "' does not exist");
  return load_game_document(doc.string());
}

inline std::optional<double> derived_strong_stability(const Game& game) {
  // Cournot's Hessian is constant, so -lambda_max(H) is a global strong-stability modulus.
  if (dynamic_cast<const CournotGame*>(&game) == nullptr) return std::nullopt;
  const Vector x = game.action_space().project(Vector::Zero(game.dim()));
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(game.hessian(x));
  const double top = eig.eigenvalues().maxCoeff();
  if (top < 0.0) return -top;
  return std::nullopt;
}

inline std::vector<long> checkpoint_grid(long horizon, long stride) {
  std::vector<long> grid = default_checkpoints(horizon);
  if (stride > 0) {
    for (long n = 1; n <= horizon; n += stride) grid.push_back(n);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace detail

inline Experiment build_experiment(const ExperimentConfig& c) {
  using detail::config_fail;
  Experiment e;
  e.config = c;
  e.game = detail::build_game(c);
  const Game& game = *e.game;
  const ProductSet& space = game.action_space();

  // Regularizers.
  try {
    if (c.regularizer.size() == 1) {
      e.regularizer = ProductRegularizer::uniform(
          c.regularizer[0] == "entropic" ? RegularizerKind::Entropic : RegularizerKind::Euclidean, space);
    } else {
      if (static_cast<int>(c.regularizer.size()) != game.players())
        config_fail("regularizer", "expected 1 or " + std::to_string(game.players()) + " kinds");
      std::vector<Regularizer> regs;
      for (int i = 0; i < game.players(); ++i) {
        const auto& kind = c.regularizer[static_cast<std::size_t>(i)];
        regs.push_back(kind == "entropic" ? Regularizer::entropic(space.factor(i)) : Regularizer::euclidean(space.factor(i)));
      }
      e.regularizer = ProductRegularizer(std::move(regs));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const UsageError& err) {
    config_fail("regularizer", err.what());
  }

  // Noise.
  if (c.noise_kind == "none") e.noise = NoiseModel::none();
  else if (c.noise_kind == "gaussian") e.noise = NoiseModel::gaussian(c.sigma);
  else if (c.noise_kind == "uniform") e.noise = NoiseModel::uniform(c.sigma);
  else if (c.noise_kind == "state-scaled") e.noise = NoiseModel::state_scaled(c.sigma);
  else {
    if (dynamic_cast<const FiniteGame*>(&game) == nullptr)
      config_fail("noise.kind", "'sampling' requires a finite game document");
    e.noise = NoiseModel::finite_game_sampling(c.sigma);
  }

  e.k = e.regularizer.strong_convexity();
  e.omega = e.regularizer.range();
  e.v_star = gradient_bound_with_noise(game, e.noise);

  // Step policy.
  try {
    if (c.step_kind == "constant") e.policy = StepPolicy::constant(c.gamma);
    else if (c.step_kind == "power") e.policy = StepPolicy::power(c.gamma, c.beta);
    else e.policy = StepPolicy::horizon_optimal(c.horizon, e.k, e.omega, e.v_star);
  } catch (const UsageError& err) {
    config_fail(c.step_kind == "power" ? "step.beta" : "step.kind", err.what());
  }

  // Initial scores.
  if (c.init.empty()) {
    e.initial_scores = Vector::Zero(game.dim());
  } else {
    if (static_cast<int>(c.init.size()) != game.dim())
      config_fail("run.init", "expected " + std::to_string(game.dim()) + " values");
    e.initial_scores = detail::to_vector(c.init);
  }

  // Candidate equilibria.
  try {
    if (c.candidate_source == "explicit") {
      const Vector p = detail::to_vector(c.candidate_point);
      if (p.size() != game.dim()) config_fail("candidate.point", "expected " + std::to_string(game.dim()) + " values");
      if (!space.contains(p)) config_fail("candidate.point", "point is not in the action space");
      e.candidates.push_back(p);
    } else if (c.candidate_source == "closed-form") {
      if (dynamic_cast<const NonConcaveStableGame*>(&game) != nullptr) {
        e.candidates.push_back(Vector::Zero(game.dim()));
      } else {
        e.candidates.push_back(nash_oracle(game, OracleMethod::ClosedForm).point);
      }
    } else if (c.candidate_source == "oracle") {
      const OracleMethod m = c.candidate_oracle == "closed-form"          ? OracleMethod::ClosedForm
                             : c.candidate_oracle == "best-response-grid" ? OracleMethod::BestResponseGrid
                                                                          : OracleMethod::FixedPointProjection;
      OracleOptions opt;
      opt.seed = c.seed;
      e.candidates.push_back(nash_oracle(game, m, opt).point);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& err) {
    config_fail("candidate.source", std::string("cannot resolve candidate equilibrium: ") + err.what());
  }
  const bool need_candidates = c.has_metric("gap") || c.has_metric("fenchel") || c.has_metric("distance") ||
                               c.has_metric("ergodic-gap") || c.bound_epsilon.has_value();
  if (e.candidates.empty() && need_candidates)
    config_fail("candidate.source", "metrics gap/fenchel/distance/ergodic-gap and bound.epsilon need candidates");

  e.checkpoints = detail::checkpoint_grid(c.horizon, c.stride);

  // Theoretical bounds: computed from (K, Omega, V*, L, F1) only.
  if (!e.candidates.empty()) {
    e.f1 = e.regularizer.fenchel_set(e.candidates, e.initial_scores);
    double sum = 0.0, sum_sq = 0.0;
    std::size_t next = 0;
    for (long n = 1; n <= c.horizon && next < e.checkpoints.size(); ++n) {
      const double g = e.policy(n);
      sum += g;
      sum_sq += g * g;
      if (e.checkpoints[next] == n) {
        e.bound_gap_ergodic.push_back((*e.f1 + e.v_star * e.v_star / (2.0 * e.k) * sum_sq) / sum);
        ++next;
      }
    }
  } else {
    e.bound_gap_ergodic.assign(e.checkpoints.size(), std::numeric_limits<double>::quiet_NaN());
  }
  e.strong_stability = c.bound_strong_stability ? c.bound_strong_stability : detail::derived_strong_stability(game);
  const double tail = e.policy.sum_squares_infinite();
  if (c.bound_epsilon && e.strong_stability && e.f1 && std::isfinite(tail)) {
    const double eps = *c.bound_epsilon;
    e.bound_length = e.v_star / (e.k * *e.strong_stability) *
                     (*e.f1 + e.v_star * e.v_star / (2.0 * e.k) * tail) / (eps * eps);
  }
  if (c.assertions.count("assert.length.within_bound") && !e.bound_length)
    config_fail("assert.length.within_bound",
                "needs bound.epsilon, a strong-stability modulus and a square-summable step policy");
  return e;
}

// ---------------------------------------------------------------------------

struct TrialOutcome {
  std::vector<Checkpoint> checkpoints;
  double final_distance = std::numeric_limits<double>::quiet_NaN();
  double final_gap = std::numeric_limits<double>::quiet_NaN();
  double final_ergodic_gap = std::numeric_limits<double>::quiet_NaN();
  double final_length = 0.0;
  std::optional<long> stopping_n;
  double stopping_length = std::numeric_limits<double>::quiet_NaN();
  Vector final_x;
  Vector ergodic_average;
};

inline TrialOutcome run_trial(const Experiment& e, long trial) {
  RunSpec spec;
  spec.game = e.game;
  spec.regularizer = e.regularizer;
  spec.policy = e.policy;
  spec.noise = e.noise;
  spec.horizon = e.config.horizon;
  spec.initial_scores = e.initial_scores;
  spec.candidates = e.candidates;
  spec.stride = 0;
  spec.checkpoints = e.checkpoints;
  if (e.config.bound_epsilon) spec.stopping_epsilons.push_back(*e.config.bound_epsilon);
  auto rng = trial_rng(e.config.seed, static_cast<std::uint64_t>(trial));
  const Trajectory traj = run(spec, rng);
  TrialOutcome out;
  out.checkpoints = traj.checkpoints;
  const Checkpoint& last = traj.checkpoints.back();
  out.final_distance = last.distance;
  out.final_gap = last.gap;
  out.final_ergodic_gap = last.ergodic_gap;
  out.final_length = traj.length;
  if (!traj.stopping.empty()) {
    const StoppingResult& s = traj.stopping.front().second;
    out.stopping_n = s.n;
    out.stopping_length = s.reached() ? s.length : traj.length;
  }
  out.final_x = traj.final_x;
  out.ergodic_average = traj.ergodic_average();
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace detail {

inline std::string cell(double v) { return std::isnan(v) ? std::string() : format_double(v); }

inline std::string trial_file_name(const ExperimentConfig& c, long trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%04ld.csv", trial);
  return c.output_prefix + buf;
}

inline const char* kSeriesHeader =
    "trial,n,gamma_n,gap,fenchel,distance,length,ergodic_gap,bound_gap_ergodic,bound_length\n";

inline std::string series_csv(const Experiment& e, long trial, const TrialOutcome& t) {
  const auto& c = e.config;
  std::string out = kSeriesHeader;
  const std::string length_bound = e.bound_length ? format_double(*e.bound_length) : std::string();
  for (std::size_t k = 0; k < t.checkpoints.size(); ++k) {
    const Checkpoint& p = t.checkpoints[k];
    out += std::to_string(trial) + "," + std::to_string(p.n) + "," + format_double(p.gamma) + ",";
    out += (c.has_metric("gap") ? cell(p.gap) : "") + ",";
    out += (c.has_metric("fenchel") ? cell(p.fenchel) : "") + ",";
    out += (c.has_metric("distance") ? cell(p.distance) : "") + ",";
    out += (c.has_metric("length") ? cell(p.length) : "") + ",";
    out += (c.has_metric("ergodic-gap") ? cell(p.ergodic_gap) : "") + ",";
    out += cell(e.bound_gap_ergodic[k]) + "," + length_bound + "\n";
  }
  return out;
}

struct Stats {
  long count = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double median = std::numeric_limits<double>::quiet_NaN();
  double q10 = std::numeric_limits<double>::quiet_NaN();
  double q90 = std::numeric_limits<double>::quiet_NaN();
  double stderr_mean = std::numeric_limits<double>::quiet_NaN();
};

// Linear-interpolation quantile of sorted data.
inline double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Values in trial order; NaN entries (empty cells) are skipped.
inline Stats stats(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  Stats s;
  s.count = static_cast<long>(v.size());
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stderr_mean = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  } else {
    s.stderr_mean = 0.0;
  }
  std::sort(v.begin(), v.end());
  s.median = quantile(v, 0.5);
  s.q10 = quantile(v, 0.1);
  s.q90 = quantile(v, 0.9);
  return s;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
}

inline int worker_count(long trials) {
  long n = static_cast<long>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GAMEDA_THREADS")) {
    const auto v = to_long(env);
    if (v && *v >= 1) n = *v;
  }
  return static_cast<int>(std::min(n, trials));
}

}  // namespace detail

struct AssertionResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ExperimentResult {
  std::vector<TrialOutcome> trials;
  std::vector<AssertionResult> assertions;
  std::vector<std::filesystem::path> files;
};

inline std::vector<AssertionResult> evaluate_assertions(const Experiment& e, const std::vector<TrialOutcome>& trials) {
  std::vector<AssertionResult> out;
  const auto& as = e.config.assertions;
  std::vector<double> final_distance;
  for (const auto& t : trials) final_distance.push_back(t.final_distance);
  if (auto it = as.find("assert.final_distance.median"); it != as.end()) {
    const double m = detail::stats(final_distance).median;
    out.push_back({"final_distance.median", m, it->second, m <= it->second});
  }
  if (auto it = as.find("assert.final_distance.threshold"); it != as.end()) {
    const double frac_needed = as.at("assert.final_distance.fraction");
    long below = 0;
    for (double d : final_distance) below += d < it->second ? 1 : 0;
    const double frac = static_cast<double>(below) / static_cast<double>(trials.size());
    out.push_back({"final_distance.fraction_below_threshold", frac, frac_needed,
                   frac >= frac_needed});
  }
  if (auto it = as.find("assert.ergodic_gap.within_bound"); it != as.end() && it->second != 0.0) {
    // Worst (mean + 2 s.e. - bound) over checkpoints.
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < e.checkpoints.size(); ++k) {
      std::vector<double> v;
      for (const auto& t : trials) v.push_back(t.checkpoints[k].ergodic_gap);
      const auto s = detail::stats(v);
      worst = std::max(worst, s.mean + 2.0 * s.stderr_mean - e.bound_gap_ergodic[k]);
    }
    out.push_back({"ergodic_gap.mean_plus_2se_minus_bound", worst, 0.0, worst <= 0.0});
  }
  if (auto it = as.find("assert.length.within_bound"); it != as.end() && it->second != 0.0) {
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.stopping_length);
    const double m = detail::stats(v).mean;
    out.push_back({"length.mean_stopping_length", m, *e.bound_length, m <= *e.bound_length});
  }
  return out;
}

// Runs all trials and writes outputs. Throws NumericAbort after removing partial outputs.
inline ExperimentResult run_experiment(const Experiment& e, std::ostream& log) {
  namespace fs = std::filesystem;
  const auto& c = e.config;
  const fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("field 'output.dir': cannot create '" + dir.string() + "': " + ec.message());

  ExperimentResult result;
  result.trials.resize(static_cast<std::size_t>(c.trials));
  std::vector<fs::path> written(static_cast<std::size_t>(c.trials));
  std::atomic<long> next{0};
  std::atomic<bool> aborted{false};
  std::mutex error_mutex;
  std::string error;

  auto worker = [&] {
    for (;;) {
      if (aborted.load()) return;
      const long trial = next.fetch_add(1);
      if (trial >= c.trials) return;
      try {
        TrialOutcome t = run_trial(e, trial);
        const fs::path file = dir / detail::trial_file_name(c, trial);
        detail::write_file(file, detail::series_csv(e, trial, t));
        written[static_cast<std::size_t>(trial)] = file;
        result.trials[static_cast<std::size_t>(trial)] = std::move(t);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!aborted.exchange(true)) error = "trial " + std::to_string(trial) + ": " + ex.what();
      }
    }
  };
  const int workers = detail::worker_count(c.trials);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (aborted) {
    for (const auto& f : written) {
      if (!f.empty()) fs::remove(f, ec);
    }
    throw NumericAbort(error);
  }

  // Per-trial table.
  std::string trials_csv = "trial,final_distance,final_gap,final_ergodic_gap,final_length,stopping_n,stopping_length\n";
  for (long t = 0; t < c.trials; ++t) {
    const auto& o = result.trials[static_cast<std::size_t>(t)];
    trials_csv += std::to_string(t) + "," + detail::cell(o.final_distance) + "," + detail::cell(o.final_gap) + "," +
                  detail::cell(o.final_ergodic_gap) + "," + detail::cell(o.final_length) + "," +
                  (o.stopping_n ? std::to_string(*o.stopping_n) : std::string()) + "," +
                  detail::cell(o.stopping_length) + "\n";
  }

  // Summary: statistics across trials at each checkpoint, plus trial-level metrics.
  std::string summary = "n,metric,count,mean,median,q10,q90,bound\n";
  auto add_row = [&](long n, const std::string& metric, const std::vector<double>& values, double bound) {
    const auto s = detail::stats(values);
    if (s.count == 0) return;
    summary += std::to_string(n) + "," + metric + "," + std::to_string(s.count) + "," + detail::cell(s.mean) + "," +
               detail::cell(s.median) + "," + detail::cell(s.q10) + "," + detail::cell(s.q90) + "," +
               detail::cell(bound) + "\n";
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < e.checkpoints.size(); ++k) {
    std::vector<double> gap, fen, dist, len, erg;
    for (const auto& o : result.trials) {
      const Checkpoint& p = o.checkpoints[k];
      gap.push_back(p.gap);
      fen.push_back(p.fenchel);
      dist.push_back(p.distance);
      len.push_back(p.length);
      erg.push_back(p.ergodic_gap);
    }
    const long n = e.checkpoints[k];
    if (c.has_metric("gap")) add_row(n, "gap", gap, nan);
    if (c.has_metric("fenchel")) add_row(n, "fenchel", fen, nan);
    if (c.has_metric("distance")) add_row(n, "distance", dist, nan);
    if (c.has_metric("length")) add_row(n, "length", len, nan);
    if (c.has_metric("ergodic-gap")) add_row(n, "ergodic_gap", erg, e.bound_gap_ergodic[k]);
  }
  {
    std::vector<double> stop;
    for (const auto& o : result.trials) stop.push_back(o.stopping_length);
    add_row(c.horizon, "stopping_length", stop, e.bound_length ? *e.bound_length : nan);
  }

  result.assertions = evaluate_assertions(e, result.trials);
  std::string assertions_csv = "assertion,value,threshold,pass\n";
  for (const auto& a : result.assertions) {
    assertions_csv += a.name + "," + format_double(a.value) + "," + format_double(a.threshold) + "," +
                      (a.pass ? "pass" : "fail") + "\n";
  }

  const fs::path extra[] = {dir / "trials.csv", dir / "summary.csv", dir / "assertions.csv", dir / "config.txt"};
  detail::write_file(extra[0], trials_csv);
  detail::write_file(extra[1], summary);
  detail::write_file(extra[2], assertions_csv);
  detail::write_file(extra[3], to_text(c));
  result.files = written;
  result.files.insert(result.files.end(), std::begin(extra), std::end(extra));

  log << "trials: " << c.trials << ", horizon: " << c.horizon << ", workers: " << workers << "\n";
  log << "K = " << format_double(e.k) << ", Omega = " << format_double(e.omega)
      << ", V* = " << format_double(e.v_star) << "\n";
  for (const auto& a : result.assertions) {
    log << (a.pass ? "PASS " : "FAIL ") << a.name << " = " << format_double(a.value)
        << " (threshold " << format_double(a.threshold) << ")\n";
  }
  return result;
}

}  // namespace gameda::cli
