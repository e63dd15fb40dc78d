#include "gameda/analysis.hpp"

#include <gtest/gtest.h>

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
const BilinearZeroSumGame kPennies = BilinearZeroSumGame::matrix_game(mat({{1, -1}, {-1, 1}}));
// Row player: T = (3, 0), B = (4, 1); the column player's game is the transpose.
const FiniteGame kDominant = FiniteGame::bimatrix(mat({{3, 0}, {4, 1}}), mat({{3, 4}, {0, 1}}));
const FiniteGame kPenniesFinite = FiniteGame::zero_sum(mat({{1, -1}, {-1, 1}}));

TEST(HessianTest, Examples) {
  const auto duopoly = CournotGame::symmetric(2, 5.0, 1.0, 1.0, 10.0);
  EXPECT_TRUE(hessian_stability_test(duopoly, vec({1, 1})));
  EXPECT_FALSE(hessian_stability_test(kPennies, vec({0.5, 0.5, 0.5, 0.5})));
  const ConcaveQuadraticGame quad(ConvexSet::box(3, -1.0, 1.0), 1.0, Vector::Zero(3));
  EXPECT_TRUE(hessian_stability_test(quad, vec({0.2, -1.0, 1.0})));
}

TEST(HessianTest, EmptyTangentSpanIsVacuouslyStable) {
  // H = 0 is not negative definite, but a one-point set has no directions to test.
  const ConcaveQuadraticGame frozen(ConvexSet::box(vec({0.5}), vec({0.5})), 0.0, vec({0}));
  EXPECT_TRUE(hessian_stability_test(frozen, vec({0.5})));
  const ConcaveQuadraticGame free(ConvexSet::box(1, 0.0, 1.0), 0.0, vec({0}));
  EXPECT_FALSE(hessian_stability_test(free, vec({0.5})));
}

TEST(Monotonicity, Examples) {
  std::mt19937_64 rng(1);
  const auto cournot = monotonicity_check(kCournot, 10000, rng);
  EXPECT_TRUE(cournot.monotone_sampled);
  EXPECT_FALSE(cournot.witness.has_value());
  ASSERT_EQ(cournot.hessian_negative_definite_on_tangent.size(), 100u);
  for (bool b : cournot.hessian_negative_definite_on_tangent) EXPECT_TRUE(b);

  const NonConcaveStableGame nc(2);
  EXPECT_NEAR(monotonicity_pairing(nc, vec({0, 0}), vec({1, 1})), 1.0 - 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(monotonicity_pairing(nc, vec({0, 0}), vec({1, 1})), 0.29289, 1e-5);
  const auto report = monotonicity_check(nc, 10000, rng);
  EXPECT_FALSE(report.monotone_sampled);
  ASSERT_TRUE(report.witness.has_value());
  EXPECT_GT(monotonicity_pairing(nc, report.witness->first, report.witness->second), tol::kCone);

  const auto bil = monotonicity_check(kPennies, 10000, rng);
  EXPECT_TRUE(bil.monotone_sampled);
  EXPECT_NEAR(bil.worst, 0.0, 1e-12);
}

TEST(VariationalStability, Examples) {
  std::mt19937_64 rng(2);
  const NonConcaveStableGame nc(2);
  EXPECT_TRUE(variational_stability_check(nc, vec({0, 0}), 10000, std::nullopt, rng));
  EXPECT_TRUE(variational_stability_check(kCournot, vec({1, 1, 1}), 10000, std::nullopt, rng));
  const auto wrong = variational_stability_check(kCournot, vec({0, 0, 0}), 1000, std::nullopt, rng);
  EXPECT_FALSE(wrong.stable);
  ASSERT_TRUE(wrong.witness.has_value());
  EXPECT_GT(kCournot.gradient(*wrong.witness).dot(*wrong.witness), 0.0);
}

TEST(VariationalStability, LocalRadius) {
  // A strict vertex equilibrium is stable nearby but the interior NE of pennies is only neutral.
  std::mt19937_64 rng(3);
  const Vector vertex = kDominant.vertex({1, 1});
  EXPECT_TRUE(variational_stability_check(kDominant, vertex, 2000, 0.1, rng));
  EXPECT_FALSE(variational_stability_check(kPenniesFinite, vec({0.5, 0.5, 0.5, 0.5}), 2000, 0.1, rng));
}

TEST(EquilibriumGap, Examples) {
  EXPECT_DOUBLE_EQ(equilibrium_gap(kCournot, vec({0, 0, 0}), {vec({1, 1, 1})}), 12.0);
  EXPECT_EQ(equilibrium_gap(kCournot, vec({1, 1, 1}), {vec({1, 1, 1})}), 0.0);
  const Vector u = vec({0.5, 0.5, 0.5, 0.5});
  EXPECT_EQ(equilibrium_gap(kPennies, u, {u}), 0.0);
  EXPECT_THROW(equilibrium_gap(kCournot, u, {}), UsageError);
}

TEST(EquilibriumGap, StrongStabilityLowerBound) {
  // lambda_max(H) = -b = -1 for symmetric Cournot, so eps(x) >= |x - x*|^2.
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(kCournot.hessian(vec({1, 1, 1})));
  const double l = -eig.eigenvalues().maxCoeff();
  EXPECT_NEAR(l, 1.0, 1e-14);
  std::mt19937_64 rng(4);
  const Vector star = vec({1, 1, 1});
  for (int s = 0; s < 10000; ++s) {
    const Vector x = kCournot.action_space().sample(rng);
    ASSERT_GE(equilibrium_gap(kCournot, x, {star}), l * (x - star).squaredNorm() - 1e-6);
  }
}

TEST(NashOracle, ClosedFormExamples) {
  const auto c = nash_oracle(kCournot, OracleMethod::ClosedForm);
  EXPECT_EQ(c.point, vec({1, 1, 1}));
  EXPECT_EQ(c.kind, CandidateKind::InteriorFirstOrder);
  EXPECT_LE(c.residual, 1e-6);
  const auto p = nash_oracle(kPennies, OracleMethod::ClosedForm);
  EXPECT_NEAR((p.point - vec({0.5, 0.5, 0.5, 0.5})).norm(), 0.0, 1e-15);
  const auto pf = nash_oracle(kPenniesFinite, OracleMethod::ClosedForm);
  EXPECT_NEAR((pf.point - vec({0.5, 0.5, 0.5, 0.5})).norm(), 0.0, 1e-15);
  const auto d = nash_oracle(kDominant, OracleMethod::ClosedForm);
  EXPECT_EQ(d.point, kDominant.vertex({1, 1}));
  EXPECT_EQ(d.kind, CandidateKind::Vertex);
}

TEST(NashOracle, ClosedFormUnsupported) {
  EXPECT_THROW(nash_oracle(NonConcaveStableGame(2), OracleMethod::ClosedForm), NotImplementedError);
  Vector b = vec({1, 2});
  const CournotGame asym(5.0, b, vec({1, 1}), vec({10, 10}));
  EXPECT_THROW(nash_oracle(asym, OracleMethod::ClosedForm), OracleFailure);
}

TEST(NashOracle, IterativeMethodsAgreeWithClosedForm) {
  for (auto method : {OracleMethod::BestResponseGrid, OracleMethod::FixedPointProjection}) {
    const auto c = nash_oracle(kCournot, method);
    EXPECT_NEAR((c.point - vec({1, 1, 1})).norm(), 0.0, 1e-5);
    const auto d = nash_oracle(kDominant, method);
    EXPECT_NEAR((d.point - kDominant.vertex({1, 1})).norm(), 0.0, 1e-6);
  }
}

TEST(NashOracle, OutputsPassSampledResidual) {
  // Every oracle output has first-order residual <= 1e-6 over 1000 random tangent rays.
  std::mt19937_64 rng(5);
  std::vector<std::pair<std::string, GamePtr>> games{
      {"cournot", std::make_shared<CournotGame>(kCournot)},
      {"pennies", std::make_shared<BilinearZeroSumGame>(kPennies)},
      {"dominant", std::make_shared<FiniteGame>(kDominant)},
      {"nonconcave", std::make_shared<NonConcaveStableGame>(2)},
  };
  for (const auto& ng : validate::reference_games()) {
    if (ng.name == "cournot" || ng.name == "congestion") games.emplace_back(ng.name + "-ref", ng.game);
  }
  for (const auto& [name, game] : games) {
    for (auto method : {OracleMethod::ClosedForm, OracleMethod::BestResponseGrid, OracleMethod::FixedPointProjection}) {
      EquilibriumCandidate c;
      try {
        c = nash_oracle(*game, method);
      } catch (const NotImplementedError&) {
        continue;
      } catch (const OracleFailure&) {
        continue;
      }
      EXPECT_LE(sampled_nash_residual(*game, c.point, 1000, rng), 1e-6) << name;
      EXPECT_LE(nash_residual(*game, c.point), 1e-6) << name;
    }
  }
}

TEST(NashOracle, FailureCarriesBestResidual) {
  OracleOptions opt;
  opt.max_iterations = 1;
  try {
    nash_oracle(kCournot, OracleMethod::FixedPointProjection, opt);
    FAIL() << "expected OracleFailure";
  } catch (const OracleFailure& e) {
    EXPECT_GT(e.best_residual(), 1e-6);
  }
}

TEST(Classifiers, DominatedStrategies) {
  const auto d = dominated_strategies(kDominant);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0], (Domination{0, 0, 1}));
  EXPECT_EQ(d[1], (Domination{1, 0, 1}));
  EXPECT_TRUE(dominated_strategies(kPenniesFinite).empty());
  const FiniteGame flat({2, 2}, std::vector<std::vector<double>>(2, std::vector<double>(4, 1.0)));
  EXPECT_TRUE(dominated_strategies(flat).empty());
}

TEST(Classifiers, StrictEquilibria) {
  EXPECT_TRUE(strict_equilibrium_check(kDominant, {1, 1}));
  EXPECT_FALSE(strict_equilibrium_check(kDominant, {0, 0}));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) EXPECT_FALSE(strict_equilibrium_check(kPenniesFinite, {a, b}));
  }
  const FiniteGame tie = FiniteGame::bimatrix(mat({{1, 0}, {1, 0}}), mat({{1, 0}, {1, 0}}));
  EXPECT_FALSE(strict_equilibrium_check(tie, {0, 0}));
}

TEST(Classifiers, SharpEquilibria) {
  EXPECT_TRUE(sharp_equilibrium_check(kDominant, kDominant.vertex({1, 1}), 1000));
  EXPECT_FALSE(sharp_equilibrium_check(kPenniesFinite, vec({0.5, 0.5, 0.5, 0.5}), 1000));
  const ConcaveQuadraticGame linear(ConvexSet::box(1, 0.0, 1.0), 0.0, vec({-1}));
  EXPECT_TRUE(sharp_equilibrium_check(linear, vec({0}), 100));
  EXPECT_FALSE(sharp_equilibrium_check(linear, vec({0.5}), 100));
}

TEST(Classifiers, StrictImpliesSharpOnRandomGames) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> pay(-3, 3);
  int strict_found = 0;
  for (int g = 0; g < 200; ++g) {
    std::vector<std::vector<double>> t(2, std::vector<double>(6));
    for (auto& row : t) {
      for (double& v : row) v = pay(rng);
    }
    const FiniteGame game({2, 3}, t);
    for (int k = 0; k < game.profile_count(); ++k) {
      const auto prof = game.profile_of(k);
      const bool strict = strict_equilibrium_check(game, prof);
      EXPECT_EQ(strict, sharp_equilibrium_check(game, game.vertex(prof), 200, rng));
      strict_found += strict ? 1 : 0;
    }
  }
  EXPECT_GT(strict_found, 10);
}

TEST(Chains, MonotoneImpliesGloballyStable) {
  std::mt19937_64 rng(7);
  for (const auto& ng : validate::reference_games()) {
    const auto report = monotonicity_check(*ng.game, 10000, rng);
    if (!report.monotone_sampled || report.worst >= -1e-12) continue;  // strictly monotone only
    const auto c = nash_oracle(*ng.game, OracleMethod::FixedPointProjection);
    EXPECT_TRUE(variational_stability_check(*ng.game, c.point, 10000, std::nullopt, rng)) << ng.name;
  }
}

}  // namespace
}  // namespace gameda
