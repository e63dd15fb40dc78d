#pragma once

// Stability certification and equilibrium measurement: Hessian test, sampled
// monotonicity and variational stability, equilibrium gap, small-instance Nash
// oracles, and the dominated / strict / sharp classifiers for finite games.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gameda/games.hpp"
#include "gameda/geometry.hpp"
#include "gameda/types.hpp"

namespace gameda {

struct Tolerances {
  double eig = 1e-8;
  double nash = 1e-6;
  double sharp = 1e-8;
  double strict = 1e-8;
  double cone = tol::kCone;
};

// ---------------------------------------------------------------------------
// Hessian test

// z^T H z < -eig |z|^2 on the span of the tangent cone at x.
inline bool hessian_stability_test(const Game& game, const Vector& x, const Tolerances& tolerances = {}) {
  if (!game.has_hessian()) throw NotImplementedError(game.name() + ": Hessian unavailable");
  const Matrix h = game.hessian(x);
  const Matrix basis = game.action_space().tangent_span(x);
  if (basis.cols() == 0) return true;
  const Matrix restricted = basis.transpose() * h * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(restricted, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff() < -tolerances.eig;
}

// ---------------------------------------------------------------------------
// Monotonicity and variational stability (sampled semidecision procedures)

// <v(x') - v(x), x' - x>; positive values violate monotonicity.
inline double monotonicity_pairing(const Game& game, const Vector& x, const Vector& x_prime) {
  return (game.gradient(x_prime) - game.gradient(x)).dot(x_prime - x);
}

struct StabilityReport {
  bool monotone_sampled = true;
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<std::pair<Vector, Vector>> witness;
  std::vector<bool> hessian_negative_definite_on_tangent;
  int samples = 0;
};

template <class Rng>
StabilityReport monotonicity_check(const Game& game, int samples, Rng& rng, const Tolerances& tolerances = {}) {
  if (samples < 1) throw UsageError("monotonicity_check: samples must be >= 1");
  constexpr int kHessianPoints = 100;
  StabilityReport report;
  report.samples = samples;
  const ProductSet& space = game.action_space();
  for (int s = 0; s < samples; ++s) {
    const Vector x = space.sample(rng);
    const Vector xp = space.sample(rng);
    const double pairing = monotonicity_pairing(game, x, xp);
    if (pairing > report.worst) {
      report.worst = pairing;
      if (pairing > tolerances.cone) report.witness = std::make_pair(x, xp);
    }
    if (game.has_hessian() && s < kHessianPoints)
      report.hessian_negative_definite_on_tangent.push_back(hessian_stability_test(game, x, tolerances));
  }
  report.monotone_sampled = report.worst <= tolerances.cone;
  return report;
}

struct VariationalStabilityReport {
  bool stable = true;
  // max over samples of <v(x), x - x*>
  double worst_pairing = -std::numeric_limits<double>::infinity();
  std::optional<Vector> witness;

  explicit operator bool() const { return stable; }
};

// Checks <v(x), x - x*> <= 0 (strictly below -strict * |x - x*|^2 away from x*)
// on random feasible x within `radius` of x* (nullopt: the whole action space).
template <class Rng>
VariationalStabilityReport variational_stability_check(const Game& game, const Vector& x_star, int samples,
                                                       std::optional<double> radius, Rng& rng,
                                                       const Tolerances& tolerances = {}) {
  const ProductSet& space = game.action_space();
  if (!space.contains(x_star)) throw UsageError("variational_stability_check: candidate is infeasible");
  if (samples < 1) throw UsageError("variational_stability_check: samples must be >= 1");
  VariationalStabilityReport report;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    const Vector z = space.sample(rng);
    Vector x = z;
    if (radius) {
      const double d = (z - x_star).norm();
      const double reach = d > 0.0 ? std::min(1.0, *radius / d) : 0.0;
      x = x_star + unif(rng) * reach * (z - x_star);
      x = space.project(x);
    }
    const double dist2 = (x - x_star).squaredNorm();
    if (dist2 == 0.0) continue;
    const double pairing = game.gradient(x).dot(x - x_star);
    report.worst_pairing = std::max(report.worst_pairing, pairing);
    const bool ok = pairing <= tolerances.cone && pairing < -tolerances.strict * dist2;
    if (!ok && report.stable) {
      report.stable = false;
      report.witness = x;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Equilibrium gap and Nash residuals

// min over x* in the set of <v(x), x* - x>.
inline double equilibrium_gap(const Game& game, const Vector& x, const std::vector<Vector>& candidates) {
  if (candidates.empty()) throw UsageError("equilibrium_gap: empty candidate set");
  const Vector v = game.gradient(x);
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& p : candidates) best = std::min(best, v.dot(p - x));
  return best;
}

// Same as above with a precomputed gradient (used inside the learning loop).
inline double equilibrium_gap(const Vector& v, const Vector& x, const std::vector<Vector>& candidates) {
  if (candidates.empty()) throw UsageError("equilibrium_gap: empty candidate set");
  double best = std::numeric_limits<double>::infinity();
  for (const Vector& p : candidates) best = std::min(best, v.dot(p - x));
  return best;
}

// max(0, max over unit extreme rays z of TC(x) of <v(x), z>): zero iff v(x) is in the polar cone.
inline double nash_residual(const Game& game, const Vector& x) {
  const Vector v = game.gradient(x);
  double worst = 0.0;
  for (const Vector& z : game.action_space().tangent_generators(x)) worst = std::max(worst, v.dot(z) / z.norm());
  return worst;
}

// Residual over `rays` random unit tangent directions.
template <class Rng>
double sampled_nash_residual(const Game& game, const Vector& x, int rays, Rng& rng) {
  const Vector v = game.gradient(x);
  double worst = 0.0;
  for (int r = 0; r < rays; ++r) {
    const Vector z = game.action_space().sample_tangent(x, rng);
    const double n = z.norm();
    if (n > 0.0) worst = std::max(worst, v.dot(z) / n);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Nash oracles

enum class OracleMethod { ClosedForm, BestResponseGrid, FixedPointProjection };
enum class CandidateKind { InteriorFirstOrder, Vertex, Supplied };

struct EquilibriumCandidate {
  Vector point;
  CandidateKind kind = CandidateKind::Supplied;
  double residual = 0.0;
};

class OracleFailure : public std::runtime_error {
 public:
  OracleFailure(const std::string& what, double best_residual)
      : std::runtime_error(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}
  double best_residual() const { return best_residual_; }

 private:
  double best_residual_;
};

struct OracleOptions {
  Tolerances tolerances{};
  long max_iterations = 1'000'000;
  std::uint64_t seed = 0x5eed;
};

namespace detail {

inline CandidateKind classify(const ProductSet& space, const Vector& x) {
  for (const Vector& z : space.tangent_generators(x)) {
    if (!space.tangent_cone_contains(x, -z)) return CandidateKind::Vertex;
  }
  return CandidateKind::InteriorFirstOrder;
}

inline EquilibriumCandidate accept(const Game& game, Vector x, const OracleOptions& opt, const char* method) {
  const double r = nash_residual(game, x);
  if (r > opt.tolerances.nash) throw OracleFailure(std::string(method) + ": residual above tolerance", r);
  EquilibriumCandidate c;
  c.kind = classify(game.action_space(), x);
  c.point = std::move(x);
  c.residual = r;
  return c;
}

// Equilibrium of a 2x2 bimatrix game: a pure equilibrium if one exists, else the
// fully mixed one from the indifference conditions.
inline std::optional<Vector> solve_2x2(const Matrix& a, const Matrix& b) {
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      if (a(r, c) >= a(1 - r, c) && b(r, c) >= b(r, 1 - c)) {
        Vector x = Vector::Zero(4);
        x[r] = 1.0;
        x[2 + c] = 1.0;
        return x;
      }
    }
  }
  const double den_q = a(0, 0) - a(0, 1) - a(1, 0) + a(1, 1);
  const double den_p = b(0, 0) - b(1, 0) - b(0, 1) + b(1, 1);
  if (den_q == 0.0 || den_p == 0.0) return std::nullopt;
  const double q = (a(1, 1) - a(0, 1)) / den_q;
  const double p = (b(1, 1) - b(1, 0)) / den_p;
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0) return std::nullopt;
  Vector x(4);
  x << p, 1.0 - p, q, 1.0 - q;
  return x;
}

inline void simplex_lattice(int dim, int parts, double scale, std::vector<Vector>& out) {
  std::vector<int> counts(static_cast<std::size_t>(dim), 0);
  auto rec = [&](auto&& self, int k, int left) -> void {
    if (k == dim - 1) {
      counts[static_cast<std::size_t>(k)] = left;
      Vector x(dim);
      for (int j = 0; j < dim; ++j) x[j] = scale * counts[static_cast<std::size_t>(j)] / parts;
      out.push_back(std::move(x));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[static_cast<std::size_t>(k)] = c;
      self(self, k + 1, left - c);
    }
  };
  rec(rec, 0, parts);
}

// Coarse grid over one player's set followed by a shrinking pattern search.
template <class Rng>
Vector best_response(const Game& game, int player, const Vector& x, Rng& rng) {
  const ProductSet& space = game.action_space();
  const ConvexSet& set = space.factor(player);
  const int d = set.dim();
  auto value = [&](const Vector& xi) {
    Vector trial = x;
    space.block(trial, player) = xi;
    return game.payoff_ambient(player, trial);
  };

  std::vector<Vector> grid;
  if (set.is_box() && d <= 3) {
    constexpr int kPoints = 11;
    const int total = static_cast<int>(std::pow(kPoints, d));
    for (int idx = 0; idx < total; ++idx) {
      Vector p(d);
      int rest = idx;
      for (int k = 0; k < d; ++k) {
        const double t = static_cast<double>(rest % kPoints) / (kPoints - 1);
        rest /= kPoints;
        p[k] = set.lower()[k] + t * (set.upper()[k] - set.lower()[k]);
      }
      grid.push_back(std::move(p));
    }
  } else if (set.is_simplex() && d <= 4) {
    simplex_lattice(d, 10, set.scale(), grid);
  } else {
    for (int s = 0; s < 2000; ++s) grid.push_back(set.sample(rng));
  }
  grid.push_back(space.block(x, player));

  Vector best = grid.front();
  double best_value = value(best);
  for (const Vector& p : grid) {
    const double u = value(p);
    if (u > best_value) {
      best_value = u;
      best = p;
    }
  }

  std::vector<Vector> directions;
  for (int k = 0; k < d; ++k) {
    if (set.is_box()) {
      directions.push_back(Vector::Unit(d, k));
      directions.push_back(-Vector::Unit(d, k));
    } else {
      for (int j = 0; j < d; ++j) {
        if (j != k) directions.push_back(Vector::Unit(d, j) - Vector::Unit(d, k));
      }
    }
  }
  double step = set.is_box() ? (set.upper() - set.lower()).maxCoeff() / 10.0 : set.scale() / 10.0;
  while (step > 1e-13) {
    bool improved = false;
    for (const Vector& dir : directions) {
      const Vector p = set.project(best + step * dir);
      const double u = value(p);
      if (u > best_value) {
        best_value = u;
        best = p;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace detail

inline EquilibriumCandidate nash_oracle(const Game& game, OracleMethod method, const OracleOptions& opt = {}) {
  const ProductSet& space = game.action_space();
  switch (method) {
    case OracleMethod::ClosedForm: {
      if (const auto* cournot = dynamic_cast<const CournotGame*>(&game)) {
        if (!cournot->has_symmetric_interior_equilibrium())
          throw OracleFailure("closed-form: Cournot instance is not symmetric with an interior equilibrium",
                              std::numeric_limits<double>::infinity());
        return detail::accept(game, cournot->symmetric_equilibrium(), opt, "closed-form");
      }
      std::optional<Vector> x;
      if (const auto* fg = dynamic_cast<const FiniteGame*>(&game); fg && fg->strategies() == std::vector<int>{2, 2}) {
        Matrix a(2, 2), b(2, 2);
        for (int r = 0; r < 2; ++r) {
          for (int c = 0; c < 2; ++c) {
            a(r, c) = fg->pure_payoff(0, {r, c});
            b(r, c) = fg->pure_payoff(1, {r, c});
          }
        }
        x = detail::solve_2x2(a, b);
      } else if (const auto* bz = dynamic_cast<const BilinearZeroSumGame*>(&game);
                 bz && bz->matrix().rows() == 2 && bz->matrix().cols() == 2 && space.factor(0).is_simplex() &&
                 space.factor(1).is_simplex() && space.factor(0).scale() == 1.0 && space.factor(1).scale() == 1.0) {
        x = detail::solve_2x2(bz->matrix(), -bz->matrix());
      } else {
        throw NotImplementedError("closed-form oracle: supported for symmetric Cournot and 2x2 matrix games");
      }
      if (!x) throw OracleFailure("closed-form: degenerate 2x2 game", std::numeric_limits<double>::infinity());
      return detail::accept(game, *x, opt, "closed-form");
    }
    case OracleMethod::BestResponseGrid: {
      if (space.dim() > 6) throw UsageError("best-response-grid: joint dimension must be <= 6");
      std::mt19937_64 rng(opt.seed);
      Vector x = space.sample(rng);
      double best_residual = std::numeric_limits<double>::infinity();
      Vector best = x;
      const long rounds = std::min<long>(opt.max_iterations, 2000);
      for (long it = 0; it < rounds; ++it) {
        const Vector before = x;
        for (int i = 0; i < space.players(); ++i) space.block(x, i) = detail::best_response(game, i, x, rng);
        const double r = nash_residual(game, x);
        if (r < best_residual) {
          best_residual = r;
          best = x;
        }
        if (r <= opt.tolerances.nash * 1e-3 || (x - before).norm() < 1e-14) break;
      }
      if (best_residual > opt.tolerances.nash)
        throw OracleFailure("best-response-grid: no convergence", best_residual);
      return detail::accept(game, best, opt, "best-response-grid");
    }
    case OracleMethod::FixedPointProjection: {
      std::mt19937_64 rng(opt.seed);
      double lipschitz = 0.0;
      for (int s = 0; s < 1000; ++s) {
        const Vector a = space.sample(rng);
        if (game.has_hessian()) {
          Eigen::JacobiSVD<Matrix> svd(game.gradient_jacobian(a));
          lipschitz = std::max(lipschitz, svd.singularValues()[0]);
        } else {
          const Vector b = space.sample(rng);
          const double d = (a - b).norm();
          if (d > 0.0) lipschitz = std::max(lipschitz, (game.gradient(a) - game.gradient(b)).norm() / d);
        }
      }
      if (!(lipschitz > 0.0)) lipschitz = 1.0;
      const double eta = 1.0 / (2.0 * lipschitz);
      Vector x = space.sample(rng);
      double best_residual = std::numeric_limits<double>::infinity();
      Vector best = x;
      for (long it = 0; it < opt.max_iterations; ++it) {
        const Vector next = space.project(x + eta * game.gradient(x));
        const double moved = (next - x).norm();
        x = next;
        if (moved < 1e-13 || it % 64 == 0) {
          const double r = nash_residual(game, x);
          if (r < best_residual) {
            best_residual = r;
            best = x;
          }
          if (moved < 1e-13 || r <= opt.tolerances.nash * 1e-3) break;
        }
      }
      if (best_residual > opt.tolerances.nash)
        throw OracleFailure("fixed-point-projection: no convergence", best_residual);
      return detail::accept(game, best, opt, "fixed-point-projection");
    }
  }
  throw UsageError("nash_oracle: unknown method");
}

// ---------------------------------------------------------------------------
// Finite-game classifiers

struct Domination {
  int player = 0;
  int strategy = 0;
  int dominator = 0;
  bool operator==(const Domination&) const = default;
};

// All (player, alpha, beta) with u_i(alpha; a_-i) < u_i(beta; a_-i) for every pure a_-i.
inline std::vector<Domination> dominated_strategies(const FiniteGame& game) {
  std::vector<Domination> out;
  const auto& counts = game.strategies();
  for (int i = 0; i < game.players(); ++i) {
    const int k = counts[static_cast<std::size_t>(i)];
    for (int alpha = 0; alpha < k; ++alpha) {
      for (int beta = 0; beta < k; ++beta) {
        if (alpha == beta) continue;
        bool dominated = true;
        for (int idx = 0; idx < game.profile_count() && dominated; ++idx) {
          auto prof = game.profile_of(idx);
          if (prof[static_cast<std::size_t>(i)] != 0) continue;  // each opponent profile once
          prof[static_cast<std::size_t>(i)] = alpha;
          const double ua = game.pure_payoff(i, prof);
          prof[static_cast<std::size_t>(i)] = beta;
          const double ub = game.pure_payoff(i, prof);
          if (!(ua < ub)) dominated = false;
        }
        if (dominated) out.push_back({i, alpha, beta});
      }
    }
  }
  return out;
}

// Every unilateral pure deviation is strictly worse.
inline bool strict_equilibrium_check(const FiniteGame& game, const std::vector<int>& profile) {
  game.profile_index(profile);
  for (int i = 0; i < game.players(); ++i) {
    const double here = game.pure_payoff(i, profile);
    std::vector<int> dev = profile;
    for (int beta = 0; beta < game.strategies()[static_cast<std::size_t>(i)]; ++beta) {
      if (beta == profile[static_cast<std::size_t>(i)]) continue;
      dev[static_cast<std::size_t>(i)] = beta;
      if (!(game.pure_payoff(i, dev) < here)) return false;
    }
  }
  return true;
}

// <v(x*), z> < -sharp for every unit extreme ray of TC(x*) and for `ray_samples`
// random unit tangent directions.
template <class Rng>
bool sharp_equilibrium_check(const Game& game, const Vector& x_star, int ray_samples, Rng& rng,
                             const Tolerances& tolerances = {}) {
  const ProductSet& space = game.action_space();
  if (!space.contains(x_star)) throw UsageError("sharp_equilibrium_check: candidate is infeasible");
  const Vector v = game.gradient(x_star);
  for (const Vector& z : space.tangent_generators(x_star)) {
    if (!(v.dot(z) / z.norm() < -tolerances.sharp)) return false;
  }
  for (int s = 0; s < ray_samples; ++s) {
    const Vector z = space.sample_tangent(x_star, rng);
    const double n = z.norm();
    if (n > 0.0 && !(v.dot(z) / n < -tolerances.sharp)) return false;
  }
  return true;
}

inline bool sharp_equilibrium_check(const Game& game, const Vector& x_star, int ray_samples,
                                    const Tolerances& tolerances = {}) {
  std::mt19937_64 rng(0x5a4b);
  return sharp_equilibrium_check(game, x_star, ray_samples, rng, tolerances);
}

}  // namespace gameda
