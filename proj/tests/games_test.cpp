#include "gameda/games.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "gameda/validate.hpp"

namespace gameda {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

const CournotGame kCournot = CournotGame::symmetric(3, 5.0, 1.0, 1.0, 10.0);

TEST(Cournot, PayoffAndGradientExamples) {
  EXPECT_DOUBLE_EQ(kCournot.payoff(0, vec({1, 1, 1})), 1.0);
  EXPECT_EQ(kCournot.gradient(vec({1, 1, 1})), vec({0, 0, 0}));
  EXPECT_TRUE(kCournot.has_symmetric_interior_equilibrium());
  EXPECT_EQ(kCournot.symmetric_equilibrium(), vec({1, 1, 1}));
  EXPECT_THROW(kCournot.payoff(0, vec({11, 1, 1})), UsageError);
  EXPECT_THROW(kCournot.gradient(vec({-1, 1, 1})), UsageError);
}

TEST(Cournot, PayoffFormula) {
  Vector b = vec({1.0, 0.5, 2.0}), c = vec({1.0, 2.0, 0.5});
  const CournotGame g(10.0, b, c, vec({5, 6, 4}));
  const Vector x = vec({1.5, 2.0, 0.25});
  const double price = 10.0 - b.dot(x);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g.payoff(i, x), x[i] * price - c[i] * x[i], 1e-14);
}

TEST(Cournot, HessianExamples) {
  const auto g = CournotGame::symmetric(2, 5.0, 1.0, 1.0, 10.0);
  EXPECT_EQ(g.hessian(vec({0.3, 7.0})), mat({{-2, -1}, {-1, -2}}));
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(g.hessian(vec({0, 0})));
  EXPECT_NEAR(eig.eigenvalues()[0], -3.0, 1e-14);
  EXPECT_NEAR(eig.eigenvalues()[1], -1.0, 1e-14);
}

TEST(Cournot, SymmetricHessianEigenvalues) {
  // b_i = b: eigenvalues -(N+1) b once and -b with multiplicity N-1.
  const auto g = CournotGame::symmetric(5, 5.0, 0.7, 1.0, 10.0);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(g.hessian(Vector::Zero(5)));
  EXPECT_NEAR(eig.eigenvalues()[0], -6 * 0.7, 1e-13);
  for (int k = 1; k < 5; ++k) EXPECT_NEAR(eig.eigenvalues()[k], -0.7, 1e-13);
}

TEST(Congestion, SingleResourceByHand) {
  const CongestionGame g({{"r", 1.0, 2.0}}, {{1.0, {{"only", {0}}}}});
  EXPECT_DOUBLE_EQ(g.payoff(0, vec({1})), -3.0);
  EXPECT_DOUBLE_EQ(g.gradient(vec({1}))[0], -5.0);
}

TEST(Congestion, CostMatchesDirectSum) {
  const auto games = validate::reference_games();
  const auto& g = dynamic_cast<const CongestionGame&>(*games[1].game);
  std::mt19937_64 rng(4);
  for (int s = 0; s < 50; ++s) {
    const Vector x = g.action_space().sample(rng);
    std::vector<double> load(g.resources().size(), 0.0);
    int k = 0;
    for (const auto& p : g.player_data()) {
      for (const auto& path : p.paths) {
        for (int r : path.resources) load[static_cast<std::size_t>(r)] += x[k];
        ++k;
      }
    }
    k = 0;
    for (int i = 0; i < g.players(); ++i) {
      double cost = 0.0;
      for (const auto& path : g.player_data()[static_cast<std::size_t>(i)].paths) {
        double latency = 0.0;
        for (int r : path.resources) {
          const auto& res = g.resources()[static_cast<std::size_t>(r)];
          latency += res.alpha + res.beta * load[static_cast<std::size_t>(r)];
        }
        cost += x[k++] * latency;
      }
      EXPECT_NEAR(g.payoff(i, x), -cost, 1e-12);
    }
  }
}

TEST(Congestion, RejectsUnknownResourceAndNegativeCosts) {
  EXPECT_THROW(CongestionGame({{"r", 1.0, 1.0}}, {{1.0, {{"p", {1}}}}}), UsageError);
  EXPECT_THROW(CongestionGame({{"r", -1.0, 1.0}}, {{1.0, {{"p", {0}}}}}), UsageError);
}

TEST(Bilinear, MatchingPenniesExamples) {
  const auto g = BilinearZeroSumGame::matrix_game(mat({{1, -1}, {-1, 1}}));
  const Vector x = vec({0.5, 0.5, 0.5, 0.5});
  EXPECT_EQ(g.payoff(0, x), 0.0);
  EXPECT_EQ(g.gradient(x), vec({0, 0, 0, 0}));
  EXPECT_EQ(g.hessian(x), Matrix::Zero(4, 4));
  const Vector corner = vec({1, 0, 0, 1});
  EXPECT_EQ(g.payoff(0, corner), -1.0);
  EXPECT_EQ(g.payoff(1, corner), 1.0);
}

TEST(Bilinear, HessianVanishesForAnyMatrix) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(3, 2);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 2; ++c) a(r, c) = n(rng);
  }
  const BilinearZeroSumGame g(a, ConvexSet::box(3, -1.0, 1.0), ConvexSet::simplex(1.0, 2));
  const Vector x = g.action_space().sample(rng);
  EXPECT_LE(g.hessian(x).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(g.gradient_jacobian(x).topRightCorner(3, 2), a);
}

TEST(Finite, ZeroSumMatchesBilinear) {
  const Matrix a = mat({{2, -1, 0}, {-3, 1, 4}});
  const auto f = FiniteGame::zero_sum(a);
  const auto b = BilinearZeroSumGame::matrix_game(a);
  std::mt19937_64 rng(6);
  for (int s = 0; s < 20; ++s) {
    const Vector x = f.action_space().sample(rng);
    EXPECT_NEAR(f.payoff(0, x), b.payoff(0, x), 1e-14);
    EXPECT_NEAR((f.gradient(x) - b.gradient(x)).norm(), 0.0, 1e-14);
  }
}

TEST(Finite, ProfileIndexingIsRowMajor) {
  const FiniteGame g({2, 3, 2}, std::vector<std::vector<double>>(3, std::vector<double>(12, 0.0)));
  EXPECT_EQ(g.profile_count(), 12);
  EXPECT_EQ(g.profile_index({0, 0, 1}), 1);
  EXPECT_EQ(g.profile_index({0, 1, 0}), 2);
  EXPECT_EQ(g.profile_index({1, 0, 0}), 6);
  for (int k = 0; k < 12; ++k) EXPECT_EQ(g.profile_index(g.profile_of(k)), k);
  EXPECT_EQ(g.vertex({1, 2, 0}), vec({0, 1, 0, 0, 1, 1, 0}));
}

TEST(Finite, PureProfilesReproduceTensor) {
  const auto games = validate::reference_games();
  const auto& g = dynamic_cast<const FiniteGame&>(*games[2].game);
  for (int k = 0; k < g.profile_count(); ++k) {
    const auto profile = g.profile_of(k);
    for (int i = 0; i < g.players(); ++i) EXPECT_NEAR(g.payoff(i, g.vertex(profile)), g.pure_payoff(i, profile), 1e-14);
  }
}

TEST(Finite, GradientIsPayoffVector) {
  // v_{i,a}(x) = u_i(a; x_-i) — evaluate at the vertex for a.
  const auto games = validate::reference_games();
  const auto& g = dynamic_cast<const FiniteGame&>(*games[2].game);
  std::mt19937_64 rng(7);
  const Vector x = g.action_space().sample(rng);
  const Vector v = g.gradient(x);
  const auto& space = g.action_space();
  for (int i = 0; i < g.players(); ++i) {
    for (int a = 0; a < space.factor(i).dim(); ++a) {
      Vector y = x;
      space.block(y, i).setZero();
      space.block(y, i)[a] = 1.0;
      EXPECT_NEAR(v[space.offset(i) + a], g.payoff(i, y), 1e-13);
    }
  }
}

TEST(NonConcave, Examples) {
  const NonConcaveStableGame g(2);
  EXPECT_DOUBLE_EQ(g.payoff(0, vec({0, 0})), -1.0);
  EXPECT_EQ(g.gradient(vec({0, 0})), vec({-0.5, -0.5}));
  EXPECT_EQ(g.players(), 1);
  EXPECT_NEAR(g.hessian(vec({0, 0}))(0, 0), 0.25, 1e-15);
}

TEST(GameInterface, HessianIsSymmetric) {
  std::mt19937_64 rng(10);
  for (const auto& [name, game] : validate::reference_games()) {
    const Vector x = game->action_space().sample(rng);
    const Matrix h = game->hessian(x);
    EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-15) << name;
  }
}

TEST(GameInterface, MissingHessianIsNotImplemented) {
  class Flat final : public Game {
   public:
    Flat() : Game(ProductSet({ConvexSet::box(1, 0.0, 1.0)})) {}
    std::string name() const override { return "flat"; }
    double payoff_ambient(int, const Vector&) const override { return 0.0; }
    Vector gradient_ambient(const Vector& x) const override { return Vector::Zero(x.size()); }
    double gradient_bound() const override { return 0.0; }
  };
  const Flat g;
  EXPECT_FALSE(g.has_hessian());
  EXPECT_THROW(g.hessian(vec({0.5})), NotImplementedError);
}

// Same seeded suite as `gameda validate gradients`.
TEST(GameProperties, GradientsSuiteHolds) {
  for (const auto& p : validate::gradients_suite(4242)) {
    EXPECT_TRUE(p.pass) << p.name << " worst slack " << p.worst_slack;
  }
}

}  // namespace
}  // namespace gameda
