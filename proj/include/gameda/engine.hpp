#pragma once

// Dual averaging: X_n = Q(Y_n), Y_{n+1} = Y_n + gamma_n * vhat_{n+1}, with
// step-size policies, gradient noise models, trajectory metrics and an RK4
// integrator for the continuous-time dynamics dy/dt = v(Q(y)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gameda/analysis.hpp"
#include "gameda/games.hpp"
#include "gameda/regularizer.hpp"
#include "gameda/types.hpp"

namespace gameda {

// ---------------------------------------------------------------------------
// Step sizes

enum class StepKind { Constant, Power, HorizonOptimal };

class StepPolicy {
 public:
  static StepPolicy constant(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw UsageError("step: gamma must be positive");
    return StepPolicy(StepKind::Constant, gamma, 0.0);
  }

  // gamma_n = gamma1 * n^-beta, beta in (0, 1].
  static StepPolicy power(double gamma1, double beta) {
    if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) throw UsageError("step: gamma must be positive");
    if (!(beta > 0.0 && beta <= 1.0)) throw UsageError("step: beta must lie in (0, 1]");
    return StepPolicy(StepKind::Power, gamma1, beta);
  }

  // Constant gamma = sqrt(2 K Omega / n) / V* for a known horizon n.
  static StepPolicy horizon_optimal(long horizon, double k, double omega, double v_star) {
    if (horizon < 1 || !(k > 0.0) || !(omega > 0.0) || !(v_star > 0.0))
      throw UsageError("step: horizon-optimal policy needs n >= 1 and positive K, Omega, V*");
    return StepPolicy(StepKind::HorizonOptimal, std::sqrt(2.0 * k * omega / static_cast<double>(horizon)) / v_star,
                      0.0);
  }

  StepKind kind() const { return kind_; }
  double gamma1() const { return gamma_; }
  double beta() const { return beta_; }

  double operator()(long n) const {
    if (kind_ == StepKind::Power) return n == 1 ? gamma_ : gamma_ * std::pow(static_cast<double>(n), -beta_);
    return gamma_;
  }

  double sum(long n) const {
    double s = 0.0;
    for (long k = 1; k <= n; ++k) s += (*this)(k);
    return s;
  }

  double sum_squares(long n) const {
    double s = 0.0;
    for (long k = 1; k <= n; ++k) s += (*this)(k) * (*this)(k);
    return s;
  }

  // sum_{k>=1} gamma_k^2; infinite unless the policy is square-summable.
  double sum_squares_infinite() const {
    if (kind_ == StepKind::Power && beta_ > 0.5) return gamma_ * gamma_ * std::riemann_zeta(2.0 * beta_);
    return std::numeric_limits<double>::infinity();
  }

 private:
  StepPolicy(StepKind kind, double gamma, double beta) : kind_(kind), gamma_(gamma), beta_(beta) {}

  StepKind kind_;
  double gamma_;
  double beta_;
};

// ---------------------------------------------------------------------------
// Gradient noise
//
// sigma is the mean-square bound E|xi|_*^2 <= sigma^2 on the joint error.
// Additive kinds spread it evenly: each coordinate has variance sigma^2 / D.

enum class NoiseKind { None, GaussianIID, UniformBounded, StateScaled, FiniteGameSampling };

class NoiseModel {
 public:
  static NoiseModel none() { return NoiseModel(NoiseKind::None, 0.0); }
  static NoiseModel gaussian(double sigma) { return NoiseModel(NoiseKind::GaussianIID, check(sigma)); }
  static NoiseModel uniform(double sigma) { return NoiseModel(NoiseKind::UniformBounded, check(sigma)); }
  static NoiseModel state_scaled(double sigma) { return NoiseModel(NoiseKind::StateScaled, check(sigma)); }
  // Pure-profile sampling in a finite game plus optional additive Gaussian noise.
  static NoiseModel finite_game_sampling(double sigma = 0.0) {
    return NoiseModel(NoiseKind::FiniteGameSampling, check(sigma));
  }

  NoiseKind kind() const { return kind_; }
  double sigma() const { return sigma_; }

  // State-dependent scale in [1/2, 1].
  static double state_scale(const Vector& x) { return 0.75 + 0.25 * std::sin(3.0 * x.sum()); }

  // Additive error xi at state x (zero for None; additive part for FiniteGameSampling).
  template <class Rng>
  Vector additive(const Vector& x, Rng& rng) const {
    const auto d = x.size();
    Vector xi = Vector::Zero(d);
    if (sigma_ == 0.0 || kind_ == NoiseKind::None) return xi;
    const double per_coord = sigma_ / std::sqrt(static_cast<double>(d));
    switch (kind_) {
      case NoiseKind::GaussianIID:
      case NoiseKind::FiniteGameSampling: {
        std::normal_distribution<double> g(0.0, per_coord);
        for (Eigen::Index k = 0; k < d; ++k) xi[k] = g(rng);
        break;
      }
      case NoiseKind::UniformBounded: {
        const double half = per_coord * std::sqrt(3.0);
        std::uniform_real_distribution<double> u(-half, half);
        for (Eigen::Index k = 0; k < d; ++k) xi[k] = u(rng);
        break;
      }
      case NoiseKind::StateScaled: {
        std::normal_distribution<double> g(0.0, per_coord * state_scale(x));
        for (Eigen::Index k = 0; k < d; ++k) xi[k] = g(rng);
        break;
      }
      case NoiseKind::None:
        break;
    }
    return xi;
  }

  // Gradient estimate vhat at x given the exact gradient v.
  template <class Rng>
  Vector estimate(const Game& game, const Vector& x, const Vector& v, Rng& rng) const {
    if (kind_ == NoiseKind::FiniteGameSampling) {
      const auto* finite = dynamic_cast<const FiniteGame*>(&game);
      if (finite == nullptr) throw UsageError("finite-game sampling noise requires a finite game");
      Vector vhat = finite->sample_payoff_vectors(x, rng);
      if (sigma_ > 0.0) vhat += additive(x, rng);
      return vhat;
    }
    return v + additive(x, rng);
  }

 private:
  NoiseModel(NoiseKind kind, double sigma) : kind_(kind), sigma_(sigma) {}

  static double check(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw UsageError("noise: sigma must be finite and >= 0");
    return sigma;
  }

  NoiseKind kind_;
  double sigma_;
};

// V* with E|vhat|_*^2 <= V*^2: deterministic gradient bound plus noise deviation.
inline double gradient_bound_with_noise(const Game& game, const NoiseModel& noise) {
  const double det = game.gradient_bound();
  return std::sqrt(det * det + noise.sigma() * noise.sigma());
}

// ---------------------------------------------------------------------------
// One step

struct StepResult {
  Vector y_next;
  Vector x;
  Vector v;     // exact gradient v(X_n)
  Vector vhat;  // estimate vhat_{n+1}
  double gamma = 0.0;
};

template <class Rng>
StepResult da_step(const Vector& y, long n, const Game& game, const ProductRegularizer& reg,
                   const StepPolicy& policy, const NoiseModel& noise, Rng& rng) {
  if (n < 1) throw UsageError("da_step: stage index must be >= 1");
  StepResult s;
  s.x = reg.choice(y);
  s.v = game.gradient(s.x);
  s.vhat = noise.estimate(game, s.x, s.v, rng);
  s.gamma = policy(n);
  s.y_next = y + s.gamma * s.vhat;
  return s;
}

// ---------------------------------------------------------------------------
// Trajectories

struct Record {
  long n = 0;
  Vector y;
  Vector x;
  Vector vhat;
  double gamma = 0.0;
  Vector ergodic_numerator;  // sum_{k<=n} gamma_k X_k
  double ergodic_denominator = 0.0;
  double length = 0.0;       // l_n
};

struct Checkpoint {
  long n = 0;
  double gamma = 0.0;
  double gap = std::numeric_limits<double>::quiet_NaN();
  double fenchel = std::numeric_limits<double>::quiet_NaN();
  double distance = std::numeric_limits<double>::quiet_NaN();
  double length = 0.0;
  double ergodic_gap = std::numeric_limits<double>::quiet_NaN();
};

struct StoppingResult {
  std::optional<long> n;  // nullopt: not reached
  double length = 0.0;
  bool reached() const { return n.has_value(); }
};

struct Trajectory {
  std::vector<Record> records;
  std::vector<Checkpoint> checkpoints;
  long horizon = 0;
  Vector final_x;        // X_horizon
  Vector final_y;        // Y_horizon
  Vector next_y;         // Y_{horizon+1}
  Vector ergodic_numerator;
  double ergodic_denominator = 0.0;
  double length = 0.0;
  double weighted_gap_sum = 0.0;  // sum gamma_k eps(X_k)
  std::vector<std::pair<double, StoppingResult>> stopping;  // per configured epsilon
  std::optional<long> arrival_index;  // first n with X_k == target for all k >= n

  Vector ergodic_average() const { return ergodic_numerator / ergodic_denominator; }
};

struct RunSpec {
  GamePtr game;
  ProductRegularizer regularizer;
  StepPolicy policy = StepPolicy::constant(1.0);
  NoiseModel noise = NoiseModel::none();
  long horizon = 1;
  std::optional<Vector> initial_scores;  // default Y_1 = 0
  std::vector<Vector> candidates;        // target equilibrium set for metrics
  long stride = 1;                       // keep every stride-th record (0: none)
  std::vector<long> checkpoints;         // empty: powers of two plus the horizon
  std::vector<double> stopping_epsilons;
  std::optional<Vector> arrival_target;
  double overflow_limit = 1e12;
};

inline std::vector<long> default_checkpoints(long horizon) {
  std::vector<long> grid;
  for (long p = 1; p < horizon; p *= 2) grid.push_back(p);
  grid.push_back(horizon);
  return grid;
}

inline double distance_to_set(const Vector& x, const std::vector<Vector>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& p : points) best = std::min(best, (x - p).norm());
  return best;
}

template <class Rng>
Trajectory run(const RunSpec& spec, Rng& rng) {
  if (!spec.game) throw UsageError("run: no game");
  if (spec.horizon < 1) throw UsageError("run: horizon must be >= 1");
  const Game& game = *spec.game;
  const ProductRegularizer& reg = spec.regularizer;
  if (reg.space().dim() != game.dim()) throw UsageError("run: regularizer does not match the game's action space");
  const bool have_candidates = !spec.candidates.empty();

  Trajectory traj;
  traj.horizon = spec.horizon;
  std::vector<long> grid = spec.checkpoints.empty() ? default_checkpoints(spec.horizon) : spec.checkpoints;
  std::sort(grid.begin(), grid.end());
  std::size_t next_checkpoint = 0;
  for (double eps : spec.stopping_epsilons) traj.stopping.emplace_back(eps, StoppingResult{});

  Vector y = spec.initial_scores ? *spec.initial_scores : Vector::Zero(game.dim());
  if (y.size() != game.dim()) throw UsageError("run: initial scores have the wrong dimension");
  traj.ergodic_numerator = Vector::Zero(game.dim());
  Vector previous_x;
  long last_mismatch = 0;

  for (long n = 1; n <= spec.horizon; ++n) {
    StepResult step = da_step(y, n, game, reg, spec.policy, spec.noise, rng);
    if (n > 1) traj.length += reg.primal_norm(step.x - previous_x);
    traj.ergodic_numerator += step.gamma * step.x;
    traj.ergodic_denominator += step.gamma;

    double gap = std::numeric_limits<double>::quiet_NaN();
    double distance = std::numeric_limits<double>::quiet_NaN();
    if (have_candidates) {
      gap = equilibrium_gap(step.v, step.x, spec.candidates);
      distance = distance_to_set(step.x, spec.candidates);
      traj.weighted_gap_sum += step.gamma * gap;
      for (auto& [eps, result] : traj.stopping) {
        if (!result.reached() && distance <= eps) {
          result.n = n;
          result.length = traj.length;
        }
      }
    }
    if (spec.arrival_target && !(step.x.array() == spec.arrival_target->array()).all()) last_mismatch = n;

    while (next_checkpoint < grid.size() && grid[next_checkpoint] < n) ++next_checkpoint;
    if (next_checkpoint < grid.size() && grid[next_checkpoint] == n) {
      Checkpoint c;
      c.n = n;
      c.gamma = step.gamma;
      c.length = traj.length;
      if (have_candidates) {
        c.gap = gap;
        c.distance = distance;
        c.fenchel = reg.fenchel_set(spec.candidates, y);
        c.ergodic_gap = traj.weighted_gap_sum / traj.ergodic_denominator;
      }
      traj.checkpoints.push_back(c);
      ++next_checkpoint;
    }

    if (spec.stride > 0 && ((n - 1) % spec.stride == 0 || n == spec.horizon)) {
      Record r;
      r.n = n;
      r.y = y;
      r.x = step.x;
      r.vhat = step.vhat;
      r.gamma = step.gamma;
      r.ergodic_numerator = traj.ergodic_numerator;
      r.ergodic_denominator = traj.ergodic_denominator;
      r.length = traj.length;
      traj.records.push_back(std::move(r));
    }

    if (n == spec.horizon) {
      traj.final_x = step.x;
      traj.final_y = y;
    }
    previous_x = std::move(step.x);
    const double size = step.y_next.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(size) || size > spec.overflow_limit) {
      std::ostringstream msg;
      msg << "score overflow at n = " << n << " (|Y|_inf = " << size << ", limit " << spec.overflow_limit << ")";
      throw NumericAbort(msg.str());
    }
    y = std::move(step.y_next);
  }
  traj.next_y = y;
  if (spec.arrival_target && last_mismatch < spec.horizon) traj.arrival_index = last_mismatch + 1;
  return traj;
}

// Step-weighted average of X_1..X_n over the recorded run (n must be a recorded stage).
inline Vector ergodic_average(const Trajectory& traj, long n) {
  if (n < 1) throw UsageError("ergodic_average: n must be >= 1");
  for (const Record& r : traj.records) {
    if (r.n == n) return r.ergodic_numerator / r.ergodic_denominator;
  }
  throw UsageError("ergodic_average: stage " + std::to_string(n) + " was not recorded");
}

// First recorded n with dist(X_n, set) <= epsilon (Euclidean), and l_n there.
inline StoppingResult stopping_time(const Trajectory& traj, const std::vector<Vector>& set, double epsilon) {
  if (!(epsilon > 0.0)) throw UsageError("stopping_time: epsilon must be positive");
  if (set.empty()) throw UsageError("stopping_time: empty target set");
  for (const Record& r : traj.records) {
    if (distance_to_set(r.x, set) <= epsilon) return StoppingResult{r.n, r.length};
  }
  return StoppingResult{};
}

// ---------------------------------------------------------------------------
// Continuous-time reference

struct ReferencePath {
  std::vector<double> t;
  std::vector<Vector> y;
  std::vector<Vector> x;
  std::vector<std::vector<double>> fenchel;  // fenchel[j][k] = F(p_j, y(t_k))
};

inline ReferencePath continuous_reference(const Game& game, const ProductRegularizer& reg, const Vector& y0,
                                          double horizon, double dt, const std::vector<Vector>& base_points) {
  if (!(dt > 0.0) || !(horizon >= dt)) throw UsageError("continuous_reference: need dt > 0 and T >= dt");
  if (y0.size() != game.dim()) throw UsageError("continuous_reference: initial point has the wrong dimension");
  auto field = [&](const Vector& y) { return game.gradient(reg.choice(y)); };
  const long steps = std::lround(horizon / dt);
  ReferencePath path;
  path.fenchel.resize(base_points.size());
  auto record = [&](double t, const Vector& y) {
    path.t.push_back(t);
    path.y.push_back(y);
    path.x.push_back(reg.choice(y));
    for (std::size_t j = 0; j < base_points.size(); ++j) path.fenchel[j].push_back(reg.fenchel(base_points[j], y));
  };
  Vector y = y0;
  record(0.0, y);
  for (long k = 1; k <= steps; ++k) {
    const Vector k1 = field(y);
    const Vector k2 = field(y + 0.5 * dt * k1);
    const Vector k3 = field(y + 0.5 * dt * k2);
    const Vector k4 = field(y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    record(static_cast<double>(k) * dt, y);
  }
  return path;
}

// Per-trial generator derived from (master seed, trial index) only.
inline std::mt19937_64 trial_rng(std::uint64_t master_seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

}  // namespace gameda
