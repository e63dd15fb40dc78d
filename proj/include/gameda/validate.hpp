#pragma once

// Seeded property suites (fenchel, gradients, cones, noise, descent, lyapunov).
// Each property reports its worst slack: the smallest (bound - value) seen, so a
// property passes iff its worst slack is >= 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gameda/analysis.hpp"
#include "gameda/engine.hpp"
#include "gameda/games.hpp"
#include "gameda/geometry.hpp"
#include "gameda/regularizer.hpp"

namespace gameda::validate {

struct PropertyResult {
  std::string name;
  bool pass = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::string detail;
};

using SuiteResult = std::vector<PropertyResult>;

inline bool all_pass(const SuiteResult& r) {
  return std::all_of(r.begin(), r.end(), [](const PropertyResult& p) { return p.pass; });
}

namespace detail {

// Tracks min slack; pass iff every slack >= 0.
class Slack {
 public:
  explicit Slack(std::string name) { result_.name = std::move(name); }
  void add(double slack) {
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    result_.worst_slack = std::min(result_.worst_slack, slack);
  }
  PropertyResult done(std::string detail = {}) {
    result_.pass = result_.worst_slack >= 0.0;
    result_.detail = std::move(detail);
    return result_;
  }

 private:
  PropertyResult result_;
};

inline Vector gaussian_vector(int d, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, scale);
  Vector y(d);
  for (int k = 0; k < d; ++k) y[k] = g(rng);
  return y;
}

// Feasible point; one time in five on the boundary (projection of a far point).
inline Vector mixed_point(const ConvexSet& set, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 4);
  if (pick(rng) == 0) return set.project(gaussian_vector(set.dim(), 10.0, rng));
  return set.sample(rng);
}

}  // namespace detail

struct NamedRegularizer {
  std::string name;
  Regularizer reg;
};

inline std::vector<NamedRegularizer> reference_regularizers() {
  Vector lo(3), hi(3);
  lo << -1.0, 0.0, 2.0;
  hi << 1.0, 0.5, 4.0;
  return {
      {"euclidean/box", Regularizer::euclidean(ConvexSet::box(lo, hi))},
      {"euclidean/simplex", Regularizer::euclidean(ConvexSet::simplex(2.0, 3))},
      {"entropic/unit-simplex", Regularizer::entropic(ConvexSet::simplex(1.0, 4))},
      {"entropic/scaled-simplex", Regularizer::entropic(ConvexSet::simplex(2.5, 3))},
  };
}

struct NamedGame {
  std::string name;
  GamePtr game;
};

// One instance of each shipped game family.
inline std::vector<NamedGame> reference_games() {
  std::vector<NamedGame> games;
  {
    Vector b(3), c(3), cap(3);
    b << 1.0, 0.5, 2.0;
    c << 1.0, 2.0, 0.5;
    cap << 5.0, 6.0, 4.0;
    games.push_back({"cournot", std::make_shared<CournotGame>(10.0, b, c, cap)});
  }
  {
    std::vector<CongestionGame::Resource> res{{"r1", 1.0, 0.5}, {"r2", 0.2, 2.0}, {"r3", 0.5, 1.0}};
    std::vector<CongestionGame::Player> players{
        {1.5, {{"p1", {0}}, {"p2", {1, 2}}, {"p3", {0, 2}}}},
        {0.7, {{"q1", {1}}, {"q2", {0, 1}}}},
    };
    games.push_back({"congestion", std::make_shared<CongestionGame>(res, players)});
  }
  {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<int> strategies{2, 3, 2};
    std::vector<std::vector<double>> pay(3, std::vector<double>(12));
    for (auto& t : pay) {
      for (double& v : t) v = u(rng);
    }
    games.push_back({"finite", std::make_shared<FiniteGame>(strategies, pay)});
  }
  {
    Matrix a(2, 3);
    a << 1.0, -2.0, 0.5, 0.3, 1.5, -1.0;
    games.push_back({"bilinear", std::make_shared<BilinearZeroSumGame>(a, ConvexSet::box(2, -1.0, 1.0),
                                                                       ConvexSet::box(3, 0.0, 2.0))});
  }
  games.push_back({"nonconcave", std::make_shared<NonConcaveStableGame>(3)});
  return games;
}

// ---------------------------------------------------------------------------

inline SuiteResult fenchel_suite(std::uint64_t seed, int instances = 10000) {
  SuiteResult out;
  for (const auto& [name, reg] : reference_regularizers()) {
    std::mt19937_64 rng(seed);
    const ConvexSet& set = reg.set();
    const int d = set.dim();
    const double k = reg.strong_convexity();
    std::uniform_int_distribution<int> coin(0, 9);
    auto dual = [&] { return detail::gaussian_vector(d, coin(rng) == 0 ? 40.0 : 3.0, rng); };

    detail::Slack nonneg(name + ": F(p,y) >= 0");
    detail::Slack norm_bound(name + ": F(p,y) >= K/2 |Q(y)-p|^2");
    detail::Slack step_bound(name + ": F(p,y') <= F(p,y) + <y'-y,Q(y)-p> + |y'-y|_*^2/(2K)");
    detail::Slack lipschitz(name + ": |Q(y)-Q(y')| <= |y-y'|_*/K");
    detail::Slack breg(name + ": F(p,y) = D(p,Q(y)) for interior Q(y)");
    for (int s = 0; s < instances; ++s) {
      const Vector p = detail::mixed_point(set, rng);
      const Vector y = dual();
      const Vector y2 = y + detail::gaussian_vector(d, 1.0, rng);
      const Vector q = reg.choice(y);
      const double f = reg.fenchel(p, y);
      nonneg.add(f + 1e-12);
      const double dq = reg.primal_norm(q - p);
      norm_bound.add(f - 0.5 * k * dq * dq + 1e-9);
      const double dy = reg.dual_norm(y2 - y);
      step_bound.add(f + (y2 - y).dot(q - p) + dy * dy / (2.0 * k) + 1e-9 - reg.fenchel(p, y2));
      lipschitz.add(dy / k + 1e-9 - reg.primal_norm(reg.choice(y2) - q));
      // Interior preimage: y = dual witness of an interior point.
      const Vector xi = set.sample(rng);
      if ((xi.array() > 0.0).all() || set.is_box()) {
        const Vector yi = reg.dual_witness(xi);
        breg.add(1e-9 - std::abs(reg.fenchel(p, yi) - reg.bregman(p, reg.choice(yi))));
      }
    }
    out.push_back(nonneg.done());
    out.push_back(norm_bound.done());
    out.push_back(step_bound.done());
    out.push_back(lipschitz.done());
    out.push_back(breg.done());

    // grad h* = Q by centered differences.
    detail::Slack grad(name + ": finite differences of h* match Q to 1e-6");
    constexpr double kStep = 1e-5;
    for (int s = 0; s < 1000; ++s) {
      const Vector y = detail::gaussian_vector(d, 3.0, rng);
      const Vector q = reg.choice(y);
      for (int c = 0; c < d; ++c) {
        Vector up = y, dn = y;
        up[c] += kStep;
        dn[c] -= kStep;
        const double fd = (reg.conjugate(up) - reg.conjugate(dn)) / (2.0 * kStep);
        grad.add(1e-6 - std::abs(fd - q[c]));
      }
    }
    out.push_back(grad.done());

    // Steep / surjective dichotomy.
    detail::Slack image(name + (reg.surjective() ? ": every vertex is attained exactly" : ": Q(y) is interior"));
    if (reg.surjective()) {
      std::vector<Vector> vertices;
      if (set.is_box()) {
        for (int mask = 0; mask < (1 << d); ++mask) {
          Vector v(d);
          for (int c = 0; c < d; ++c) v[c] = (mask >> c) & 1 ? set.upper()[c] : set.lower()[c];
          vertices.push_back(v);
        }
      } else {
        for (int c = 0; c < d; ++c) vertices.push_back(set.scale() * Vector::Unit(d, c));
      }
      for (const Vector& v : vertices) {
        // Preimages: the witness itself and the witness shifted into the normal cone.
        const Vector w = reg.dual_witness(v);
        image.add((reg.choice(w).array() == v.array()).all() ? 0.0 : -1.0);
        const Vector far = v + 5.0 * (v - set.project(Vector::Constant(d, set.is_box() ? 0.0 : set.scale() / d)));
        const Vector shifted = w + (far - set.project(far));
        image.add((reg.choice(shifted).array() == v.array()).all() ? 0.0 : -1.0);
      }
    } else {
      for (int s = 0; s < 1000; ++s) image.add(reg.choice(detail::gaussian_vector(d, 20.0, rng)).minCoeff());
    }
    out.push_back(image.done());

    // Reciprocity: F(p, y_n) -> 0 along preimages of points converging to p.
    detail::Slack recip(name + ": F(p, y_n) decreases to 0 as Q(y_n) -> p");
    {
      Vector p;
      std::vector<Vector> ys;
      if (reg.surjective()) {
        // Boundary point p with a normal direction; every y_n maps exactly to p.
        const Vector w = detail::gaussian_vector(d, 10.0, rng);
        p = set.project(w);
        const Vector normal = w - p;
        for (int k = 0; k <= 30; ++k) ys.push_back(reg.dual_witness(p) + std::ldexp(1.0, k) * normal);
      } else {
        p = set.sample(rng);
        const Vector q = set.sample(rng);
        for (int k = 0; k <= 30; ++k) ys.push_back(reg.dual_witness(p + std::ldexp(1.0, -k) * (q - p)));
      }
      double prev = std::numeric_limits<double>::infinity();
      for (const Vector& y : ys) {
        const double f = reg.fenchel(p, y);
        recip.add(prev - f + 1e-12);
        prev = f;
      }
      recip.add(1e-9 - prev);
    }
    out.push_back(recip.done());
  }
  return out;
}

// ---------------------------------------------------------------------------

inline SuiteResult gradients_suite(std::uint64_t seed, int points = 200) {
  SuiteResult out;
  for (const auto& [name, game] : reference_games()) {
    std::mt19937_64 rng(seed);
    const ProductSet& space = game->action_space();
    detail::Slack grad(name + ": gradient vs finite differences (rel. err <= 1e-5)");
    detail::Slack hess(name + ": Hessian vs finite differences (rel. err <= 1e-4)");
    detail::Slack bound(name + ": |v(x)| <= V*");
    for (int s = 0; s < points; ++s) {
      const Vector x = space.sample(rng);
      const Vector v = game->gradient(x);
      bound.add(game->gradient_bound() - v.norm());
      constexpr double h = 1e-6;
      for (int i = 0; i < game->players(); ++i) {
        for (int c = 0; c < space.factor(i).dim(); ++c) {
          const int a = space.offset(i) + c;
          Vector up = x, dn = x;
          up[a] += h;
          dn[a] -= h;
          const double fd = (game->payoff_ambient(i, up) - game->payoff_ambient(i, dn)) / (2.0 * h);
          grad.add(1e-5 - std::abs(fd - v[a]) / std::max(1.0, std::abs(v[a])));
        }
      }
      if (game->has_hessian()) {
        constexpr double hh = 1e-5;
        Matrix jac(game->dim(), game->dim());
        for (int b = 0; b < game->dim(); ++b) {
          Vector up = x, dn = x;
          up[b] += hh;
          dn[b] -= hh;
          jac.col(b) = (game->gradient_ambient(up) - game->gradient_ambient(dn)) / (2.0 * hh);
        }
        const Matrix fd = 0.5 * (jac + jac.transpose());
        const Matrix exact = game->hessian(x);
        const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
        hess.add(1e-4 - (fd - exact).cwiseAbs().maxCoeff() / scale);
      }
    }
    out.push_back(grad.done());
    if (game->has_hessian()) out.push_back(hess.done());
    out.push_back(bound.done());

    if (name == "bilinear") {
      detail::Slack zs(name + ": u_A + u_B = 0");
      for (int s = 0; s < points; ++s) {
        const Vector x = space.sample(rng);
        zs.add(1e-12 - std::abs(game->payoff(0, x) + game->payoff(1, x)));
      }
      out.push_back(zs.done());
    }
    if (name == "finite") {
      detail::Slack ml(name + ": payoff is affine in each player's own block");
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int s = 0; s < points; ++s) {
        const Vector x = space.sample(rng);
        const Vector x2 = space.sample(rng);
        const double lam = u(rng);
        for (int i = 0; i < game->players(); ++i) {
          Vector a = x, b = x, mix = x;
          space.block(b, i) = space.block(x2, i);
          space.block(mix, i) = lam * space.block(x, i) + (1.0 - lam) * space.block(x2, i);
          const double blend = lam * game->payoff(i, a) + (1.0 - lam) * game->payoff(i, b);
          ml.add(1e-12 - std::abs(game->payoff(i, space.project(mix)) - blend));
        }
      }
      out.push_back(ml.done());
    }
    if (name == "nonconcave") {
      detail::Slack vs(name + ": <v(x), x - 0> < 0 away from the origin");
      for (int s = 0; s < points; ++s) {
        const Vector x = space.sample(rng);
        vs.add(-game->gradient(x).dot(x));
      }
      out.push_back(vs.done());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

inline SuiteResult cones_suite(std::uint64_t seed, int instances = 10000) {
  SuiteResult out;
  std::vector<std::pair<std::string, ConvexSet>> sets;
  for (const auto& r : reference_regularizers()) {
    if (sets.size() < 3) sets.emplace_back(r.name.substr(r.name.find('/') + 1), r.reg.set());
  }
  for (const auto& [name, set] : sets) {
    std::mt19937_64 rng(seed);
    const int d = set.dim();
    detail::Slack idem(name + ": projection is idempotent");
    detail::Slack vi(name + ": <y - Py, x - Py> <= 0");
    detail::Slack nonexp(name + ": projection is nonexpansive");
    detail::Slack duality(name + ": polar vectors pair nonpositively with tangent directions");
    for (int s = 0; s < instances; ++s) {
      const Vector y = detail::gaussian_vector(d, 3.0, rng);
      const Vector p = set.project(y);
      idem.add(1e-12 - (set.project(p) - p).lpNorm<Eigen::Infinity>());
      vi.add(1e-9 - (y - p).dot(set.sample(rng) - p));
      const Vector y2 = detail::gaussian_vector(d, 3.0, rng);
      nonexp.add((y2 - y).norm() + 1e-12 - (set.project(y2) - p).norm());
    }
    for (int s = 0; s < 100; ++s) {
      const Vector w = detail::gaussian_vector(d, 5.0, rng);
      const Vector x = set.project(w);
      Vector y = w - x;
      if (!set.polar_cone_contains(x, y)) {
        duality.add(-1.0);
        continue;
      }
      for (int r = 0; r < 1000; ++r) {
        const Vector z = set.sample_tangent(x, rng);
        const double n = z.norm();
        if (n > 0.0) duality.add(tol::kCone - y.dot(z / n));
      }
    }
    out.push_back(idem.done());
    out.push_back(vi.done());
    out.push_back(nonexp.done());
    out.push_back(duality.done());
  }
  return out;
}

// ---------------------------------------------------------------------------

inline SuiteResult noise_suite(std::uint64_t seed, int draws = 100000) {
  SuiteResult out;
  const double sigma = 1.5;
  const int d = 4;
  Vector x(d);
  x << 0.1, 0.2, 0.3, 0.4;
  const std::vector<std::pair<std::string, NoiseModel>> models{
      {"gaussian", NoiseModel::gaussian(sigma)},
      {"uniform", NoiseModel::uniform(sigma)},
      {"state-scaled", NoiseModel::state_scaled(sigma)},
  };
  const double sqrt_n = std::sqrt(static_cast<double>(draws));
  for (const auto& [name, model] : models) {
    std::mt19937_64 rng(seed);
    Vector sum = Vector::Zero(d);
    double sq_sum = 0.0;
    double sq_sq_sum = 0.0;
    for (int s = 0; s < draws; ++s) {
      const Vector xi = model.additive(x, rng);
      sum += xi;
      const double q = xi.squaredNorm();
      sq_sum += q;
      sq_sq_sum += q * q;
    }
    const Vector mean = sum / draws;
    const double coord_sd = sigma / std::sqrt(static_cast<double>(d));
    detail::Slack h1(name + ": mean within 4 sd/sqrt(n) of 0");
    for (int c = 0; c < d; ++c) h1.add(4.0 * coord_sd / sqrt_n - std::abs(mean[c]));
    const double m2 = sq_sum / draws;
    const double var = std::max(0.0, sq_sq_sum / draws - m2 * m2);
    detail::Slack h2(name + ": mean |xi|^2 <= sigma^2 + 4 CI");
    h2.add(sigma * sigma + 4.0 * std::sqrt(var / draws) - m2);
    out.push_back(h1.done());
    out.push_back(h2.done());
  }
  {
    std::mt19937_64 rng(seed);
    Matrix a(2, 3), b(2, 3);
    a << 1.0, -2.0, 3.0, 0.0, 2.0, -1.0;
    b << -1.0, 0.5, 2.0, 1.0, -3.0, 0.0;
    const FiniteGame game = FiniteGame::bimatrix(a, b);
    Vector mixed(5);
    mixed << 0.3, 0.7, 0.2, 0.5, 0.3;
    const Vector expected = game.gradient(mixed);
    Vector sum = Vector::Zero(5);
    for (int s = 0; s < draws; ++s) sum += game.sample_payoff_vectors(mixed, rng);
    const Vector mean = sum / draws;
    detail::Slack h1("finite-game sampling: mean payoff vector within 4 range/sqrt(n)");
    for (int c = 0; c < 5; ++c) h1.add(4.0 * game.payoff_range() / sqrt_n - std::abs(mean[c] - expected[c]));
    out.push_back(h1.done());
  }
  return out;
}

// ---------------------------------------------------------------------------

struct DescentScenario {
  std::string name;
  GamePtr game;
  ProductRegularizer reg;
  NoiseModel noise;
  Vector anchor;
};

inline std::vector<DescentScenario> descent_scenarios() {
  std::vector<DescentScenario> s;
  {
    auto g = std::make_shared<CournotGame>(CournotGame::symmetric(3, 5.0, 1.0, 1.0, 10.0));
    s.push_back({"cournot/euclidean/gaussian", g,
                 ProductRegularizer::uniform(RegularizerKind::Euclidean, g->action_space()), NoiseModel::gaussian(1.0),
                 Vector::Ones(3)});
  }
  {
    Matrix a(2, 2), b(2, 2);
    a << 0.0, 1.0, 1.0, 2.0;
    b << 0.0, 1.0, 1.0, 2.0;
    auto g = std::make_shared<FiniteGame>(FiniteGame::bimatrix(a, b.transpose()));
    Vector anchor(4);
    anchor << 0.0, 1.0, 0.0, 1.0;
    s.push_back({"finite/entropic/sampling", g,
                 ProductRegularizer::uniform(RegularizerKind::Entropic, g->action_space()),
                 NoiseModel::finite_game_sampling(0.5), anchor});
  }
  {
    std::vector<CongestionGame::Resource> res{{"a", 1.0, 1.0}, {"b", 2.0, 0.5}};
    std::vector<CongestionGame::Player> players{{2.0, {{"x", {0}}, {"y", {1}}}}, {1.0, {{"x", {0}}, {"y", {1}}}}};
    auto g = std::make_shared<CongestionGame>(res, players);
    Vector anchor(4);
    anchor << 1.0, 1.0, 0.5, 0.5;
    s.push_back({"congestion/entropic/state-scaled", g,
                 ProductRegularizer::uniform(RegularizerKind::Entropic, g->action_space()),
                 NoiseModel::state_scaled(1.0), anchor});
    s.push_back({"congestion/euclidean/uniform", g,
                 ProductRegularizer::uniform(RegularizerKind::Euclidean, g->action_space()), NoiseModel::uniform(1.0),
                 anchor});
  }
  return s;
}

inline SuiteResult descent_suite(std::uint64_t seed, long horizon = 5000) {
  SuiteResult out;
  for (const auto& sc : descent_scenarios()) {
    RunSpec spec;
    spec.game = sc.game;
    spec.regularizer = sc.reg;
    spec.policy = StepPolicy::power(0.5, 0.6);
    spec.noise = sc.noise;
    spec.horizon = horizon;
    spec.stride = 1;
    auto rng = trial_rng(seed, 0);
    const Trajectory traj = run(spec, rng);
    const double k = sc.reg.strong_convexity();
    detail::Slack descent(sc.name + ": F(x*,Y+) <= F(x*,Y) + g<vhat,X-x*> + g^2|vhat|_*^2/(2K)");
    detail::Slack feasible(sc.name + ": every X_n is feasible");
    detail::Slack consistent(sc.name + ": Q(Y_n) reproduces X_n bit-exactly");
    detail::Slack length(sc.name + ": running length is nondecreasing");
    for (std::size_t r = 0; r < traj.records.size(); ++r) {
      const Record& rec = traj.records[r];
      const Vector& y_next = r + 1 < traj.records.size() ? traj.records[r + 1].y : traj.next_y;
      const double vn = sc.reg.dual_norm(rec.vhat);
      const double rhs = sc.reg.fenchel(sc.anchor, rec.y) + rec.gamma * rec.vhat.dot(rec.x - sc.anchor) +
                         rec.gamma * rec.gamma * vn * vn / (2.0 * k) + 1e-9;
      descent.add(rhs - sc.reg.fenchel(sc.anchor, y_next));
      feasible.add(sc.game->action_space().contains(rec.x) ? 0.0 : -1.0);
      consistent.add((sc.reg.choice(rec.y).array() == rec.x.array()).all() ? 0.0 : -1.0);
      if (r > 0) length.add(rec.length - traj.records[r - 1].length);
    }
    const Vector avg = traj.ergodic_average();
    feasible.add(sc.game->action_space().contains(avg) ? 0.0 : -1.0);
    out.push_back(descent.done());
    out.push_back(feasible.done());
    out.push_back(consistent.done());
    out.push_back(length.done());
  }
  return out;
}

// ---------------------------------------------------------------------------

struct LyapunovCheck {
  double max_identity_error = 0.0;  // |dF/dt - <v(x), x - p>|
  double max_increase = 0.0;        // max_k F(t_{k+1}) - F(t_k)
};

// Centered differences of F(p, y(t)) against <v(x(t)), x(t) - p> along an RK4 path.
inline LyapunovCheck lyapunov_check(const Game& game, const ProductRegularizer& reg, const Vector& y0,
                                    const Vector& p, double horizon, double dt) {
  const ReferencePath path = continuous_reference(game, reg, y0, horizon, dt, {p});
  const auto& f = path.fenchel[0];
  LyapunovCheck c;
  for (std::size_t k = 1; k + 1 < f.size(); ++k) {
    const double fd = (f[k + 1] - f[k - 1]) / (path.t[k + 1] - path.t[k - 1]);
    const double exact = game.gradient(path.x[k]).dot(path.x[k] - p);
    c.max_identity_error = std::max(c.max_identity_error, std::abs(fd - exact));
  }
  c.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < f.size(); ++k) c.max_increase = std::max(c.max_increase, f[k + 1] - f[k]);
  return c;
}

inline SuiteResult lyapunov_suite(std::uint64_t /*seed*/) {
  SuiteResult out;
  {
    auto g = std::make_shared<CournotGame>(CournotGame::symmetric(3, 5.0, 1.0, 1.0, 10.0));
    const auto reg = ProductRegularizer::uniform(RegularizerKind::Euclidean, g->action_space());
    Vector y0(3);
    y0 << 2.0, 0.5, 1.5;
    const auto c = lyapunov_check(*g, reg, y0, Vector::Ones(3), 50.0, 1e-3);
    detail::Slack id("cournot/euclidean: |dF/dt - <v(x), x - x*>| <= 1e-4");
    id.add(1e-4 - c.max_identity_error);
    detail::Slack mono("cournot/euclidean: F(x*, y(t)) nonincreasing");
    mono.add(1e-10 - c.max_increase);
    out.push_back(id.done());
    out.push_back(mono.done());
  }
  {
    Matrix a(2, 2), b(2, 2);
    a << 0.0, 1.0, 1.0, 2.0;
    b << 0.0, 1.0, 1.0, 2.0;
    auto g = std::make_shared<FiniteGame>(FiniteGame::bimatrix(a, b.transpose()));
    const auto reg = ProductRegularizer::uniform(RegularizerKind::Entropic, g->action_space());
    Vector p(4);
    p << 0.0, 1.0, 0.0, 1.0;
    const auto c = lyapunov_check(*g, reg, Vector::Zero(4), p, 10.0, 1e-3);
    detail::Slack id("finite/entropic: |dF/dt - <v(x), x - x*>| <= 1e-4");
    id.add(1e-4 - c.max_identity_error);
    detail::Slack mono("finite/entropic: F(x*, y(t)) nonincreasing");
    mono.add(1e-10 - c.max_increase);
    out.push_back(id.done());
    out.push_back(mono.done());
  }
  return out;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"fenchel", "gradients", "cones", "noise", "descent", "lyapunov"};
  return names;
}

inline std::optional<SuiteResult> run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "fenchel") return fenchel_suite(seed);
  if (name == "gradients") return gradients_suite(seed);
  if (name == "cones") return cones_suite(seed);
  if (name == "noise") return noise_suite(seed);
  if (name == "descent") return descent_suite(seed);
  if (name == "lyapunov") return lyapunov_suite(seed);
  if (name == "all") {
    SuiteResult all;
    for (const auto& n : suite_names()) {
      auto r = *run_suite(n, seed);
      all.insert(all.end(), r.begin(), r.end());
    }
    return all;
  }
  return std::nullopt;
}

}  // namespace gameda::validate
