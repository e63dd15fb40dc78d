#include "gameda/engine.hpp"

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

GamePtr cournot() { return std::make_shared<CournotGame>(CournotGame::symmetric(3, 5.0, 1.0, 1.0, 10.0)); }

ProductRegularizer euclidean(const Game& g) {
  return ProductRegularizer::uniform(RegularizerKind::Euclidean, g.action_space());
}

Record record(long n, const Vector& x, double gamma, const Record* prev) {
  Record r;
  r.n = n;
  r.x = x;
  r.gamma = gamma;
  r.ergodic_numerator = (prev ? prev->ergodic_numerator : Vector::Zero(x.size())) + gamma * x;
  r.ergodic_denominator = (prev ? prev->ergodic_denominator : 0.0) + gamma;
  r.length = prev ? prev->length + (x - prev->x).norm() : 0.0;
  return r;
}

TEST(StepPolicy, Values) {
  const auto p = StepPolicy::power(2.0, 0.5);
  EXPECT_EQ(p(1), 2.0);
  EXPECT_DOUBLE_EQ(p(4), 1.0);
  for (long n = 1; n < 100; ++n) EXPECT_GE(p(n), p(n + 1));
  EXPECT_EQ(StepPolicy::constant(0.3)(1000), 0.3);
  EXPECT_DOUBLE_EQ(StepPolicy::horizon_optimal(100, 2.0, 0.5, 4.0)(7), std::sqrt(2.0 * 2.0 * 0.5 / 100) / 4.0);
  EXPECT_THROW(StepPolicy::power(1.0, 1.5), UsageError);
  EXPECT_THROW(StepPolicy::power(1.0, 0.0), UsageError);
  EXPECT_THROW(StepPolicy::constant(-1.0), UsageError);
}

TEST(StepPolicy, InfiniteSumOfSquares) {
  // sum n^-2 = pi^2 / 6; partial sums approach it from below.
  const auto p = StepPolicy::power(1.0, 1.0);
  EXPECT_NEAR(p.sum_squares_infinite(), M_PI * M_PI / 6.0, 1e-14);
  EXPECT_LT(p.sum_squares(1000), p.sum_squares_infinite());
  EXPECT_NEAR(p.sum_squares(1000000), p.sum_squares_infinite(), 2e-6);
  EXPECT_TRUE(std::isinf(StepPolicy::power(1.0, 0.5).sum_squares_infinite()));
  EXPECT_TRUE(std::isinf(StepPolicy::constant(1.0).sum_squares_infinite()));
}

TEST(DaStep, RestPointUnderPerfectFeedback) {
  const auto g = cournot();
  const auto reg = euclidean(*g);
  std::mt19937_64 rng(1);
  const Vector y = vec({1, 1, 1});
  const auto s = da_step(y, 1, *g, reg, StepPolicy::constant(1.0), NoiseModel::none(), rng);
  EXPECT_EQ(s.x, vec({1, 1, 1}));
  EXPECT_EQ(s.y_next, y);
  EXPECT_EQ(reg.choice(s.y_next), s.x);
}

TEST(DaStep, FirstEuclideanStepFromOrigin) {
  const auto g = cournot();
  const auto reg = euclidean(*g);
  std::mt19937_64 rng(1);
  const auto s = da_step(Vector::Zero(3), 1, *g, reg, StepPolicy::power(1.0, 0.6), NoiseModel::none(), rng);
  EXPECT_EQ(s.x, vec({0, 0, 0}));
  EXPECT_EQ(s.y_next, vec({4, 4, 4}));
  EXPECT_EQ(reg.choice(s.y_next), vec({4, 4, 4}));
  EXPECT_THROW(da_step(Vector::Zero(3), 0, *g, reg, StepPolicy::constant(1.0), NoiseModel::none(), rng), UsageError);
}

TEST(DaStep, DeterministicGivenRngState) {
  const auto g = cournot();
  const auto reg = euclidean(*g);
  std::mt19937_64 a(9), b(9);
  const auto noise = NoiseModel::gaussian(1.0);
  const auto s1 = da_step(vec({1, 2, 3}), 5, *g, reg, StepPolicy::constant(0.1), noise, a);
  const auto s2 = da_step(vec({1, 2, 3}), 5, *g, reg, StepPolicy::constant(0.1), noise, b);
  EXPECT_EQ(s1.y_next, s2.y_next);
  EXPECT_EQ(s1.vhat, s2.vhat);
}

TEST(Run, HorizonOne) {
  RunSpec spec;
  spec.game = cournot();
  spec.regularizer = euclidean(*spec.game);
  spec.horizon = 1;
  std::mt19937_64 rng(2);
  const auto t = run(spec, rng);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.length, 0.0);
  EXPECT_EQ(t.records[0].length, 0.0);
  EXPECT_EQ(t.next_y, vec({4, 4, 4}));
}

TEST(Run, RestPointHasZeroGap) {
  RunSpec spec;
  spec.game = cournot();
  spec.regularizer = euclidean(*spec.game);
  spec.policy = StepPolicy::constant(0.01);
  spec.horizon = 100;
  spec.initial_scores = vec({1, 1, 1});
  spec.candidates = {vec({1, 1, 1})};
  spec.checkpoints = {1, 2, 3, 50, 100};
  std::mt19937_64 rng(3);
  const auto t = run(spec, rng);
  for (const auto& r : t.records) EXPECT_EQ(r.x, vec({1, 1, 1}));
  ASSERT_EQ(t.checkpoints.size(), 5u);
  for (const auto& c : t.checkpoints) {
    EXPECT_EQ(c.gap, 0.0);
    EXPECT_EQ(c.distance, 0.0);
    EXPECT_EQ(c.ergodic_gap, 0.0);
  }
  EXPECT_EQ(stopping_time(t, spec.candidates, 1e-9).n, 1);
}

TEST(Run, StrideAndDefaultCheckpoints) {
  RunSpec spec;
  spec.game = cournot();
  spec.regularizer = euclidean(*spec.game);
  spec.horizon = 10;
  spec.stride = 4;
  spec.candidates = {vec({1, 1, 1})};
  std::mt19937_64 rng(4);
  const auto t = run(spec, rng);
  std::vector<long> ns;
  for (const auto& r : t.records) ns.push_back(r.n);
  EXPECT_EQ(ns, (std::vector<long>{1, 5, 9, 10}));
  std::vector<long> cs;
  for (const auto& c : t.checkpoints) cs.push_back(c.n);
  EXPECT_EQ(cs, (std::vector<long>{1, 2, 4, 8, 10}));
  EXPECT_EQ(default_checkpoints(1), (std::vector<long>{1}));
}

TEST(Run, SameSeedSameTrajectory) {
  RunSpec spec;
  spec.game = cournot();
  spec.regularizer = euclidean(*spec.game);
  spec.policy = StepPolicy::power(1.0, 0.6);
  spec.noise = NoiseModel::gaussian(1.0);
  spec.horizon = 500;
  auto a = trial_rng(7, 3), b = trial_rng(7, 3), c = trial_rng(7, 4);
  const auto ta = run(spec, a), tb = run(spec, b), tc = run(spec, c);
  ASSERT_EQ(ta.records.size(), tb.records.size());
  for (std::size_t k = 0; k < ta.records.size(); ++k) EXPECT_EQ(ta.records[k].y, tb.records[k].y);
  EXPECT_NE(ta.final_y, tc.final_y);
}

TEST(Run, FeasibleAndConsistentUnderEveryNoise) {
  const auto g = cournot();
  for (const auto& noise : {NoiseModel::none(), NoiseModel::gaussian(2.0), NoiseModel::uniform(2.0),
                            NoiseModel::state_scaled(2.0)}) {
    RunSpec spec;
    spec.game = g;
    spec.regularizer = euclidean(*g);
    spec.policy = StepPolicy::power(1.0, 0.5);
    spec.noise = noise;
    spec.horizon = 2000;
    std::mt19937_64 rng(5);
    const auto t = run(spec, rng);
    double last = 0.0;
    for (const auto& r : t.records) {
      ASSERT_TRUE(g->action_space().contains(r.x));
      ASSERT_EQ(spec.regularizer.choice(r.y), r.x);
      ASSERT_GE(r.length, last);
      last = r.length;
    }
    EXPECT_TRUE(g->action_space().contains(ergodic_average(t, 2000)));
  }
}

TEST(Run, OverflowAborts) {
  RunSpec spec;
  spec.game = cournot();
  spec.regularizer = euclidean(*spec.game);
  spec.policy = StepPolicy::constant(1e13);
  spec.horizon = 10;
  std::mt19937_64 rng(6);
  EXPECT_THROW(run(spec, rng), NumericAbort);
  spec.policy = StepPolicy::constant(1.0);
  spec.noise = NoiseModel::finite_game_sampling();
  EXPECT_THROW(run(spec, rng), UsageError);
}

TEST(Run, ArrivalIndex) {
  // Euclidean DA on a box reaches the vertex equilibrium in finite time and stays there.
  Matrix a(2, 2), b(2, 2);
  a << 3, 0, 4, 1;
  b << 3, 4, 0, 1;
  RunSpec spec;
  spec.game = std::make_shared<FiniteGame>(FiniteGame::bimatrix(a, b));
  spec.regularizer = euclidean(*spec.game);
  spec.policy = StepPolicy::constant(0.5);
  spec.horizon = 50;
  spec.arrival_target = vec({0, 1, 0, 1});
  std::mt19937_64 rng(7);
  const auto t = run(spec, rng);
  ASSERT_TRUE(t.arrival_index.has_value());
  for (const auto& r : t.records) EXPECT_EQ(r.n >= *t.arrival_index, r.x == *spec.arrival_target) << r.n;
}

TEST(Ergodic, Examples) {
  Trajectory t;
  t.records.push_back(record(1, vec({0, 1}), 1.0, nullptr));
  t.records.push_back(record(2, vec({1, 0}), 1.0, &t.records[0]));
  EXPECT_EQ(ergodic_average(t, 2), vec({0.5, 0.5}));
  EXPECT_EQ(ergodic_average(t, 1), vec({0, 1}));
  EXPECT_THROW(ergodic_average(t, 0), UsageError);
  EXPECT_THROW(ergodic_average(t, 3), UsageError);

  // Power(1, 1): weights 1 and 1/2.
  Trajectory w;
  const auto p = StepPolicy::power(1.0, 1.0);
  w.records.push_back(record(1, vec({1, 0}), p(1), nullptr));
  w.records.push_back(record(2, vec({0, 1}), p(2), &w.records[0]));
  const Vector avg = ergodic_average(w, 2);
  EXPECT_NEAR(avg[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(avg[1], 1.0 / 3.0, 1e-15);
}

TEST(Stopping, Examples) {
  const std::vector<Vector> star{vec({0, 0})};
  Trajectory t;
  const Record* prev = nullptr;
  long n = 1;
  for (double d : {3.0, 2.0, 1.0, 0.5}) {
    t.records.push_back(record(n++, vec({d, 0}), 1.0, prev));
    prev = &t.records.back();
  }
  const auto s = stopping_time(t, star, 1.0);
  ASSERT_TRUE(s.reached());
  EXPECT_EQ(*s.n, 3);
  EXPECT_DOUBLE_EQ(s.length, 2.0);
  EXPECT_EQ(stopping_time(t, star, 10.0).n, 1);
  EXPECT_EQ(stopping_time(t, star, 10.0).length, 0.0);
  EXPECT_FALSE(stopping_time(t, star, 0.1).reached());
  EXPECT_THROW(stopping_time(t, star, 0.0), UsageError);
}

TEST(Stopping, RunTracksEveryEpsilonWithoutRecords) {
  RunSpec spec;
  spec.game = cournot();
  spec.regularizer = euclidean(*spec.game);
  spec.policy = StepPolicy::power(1.0, 0.7);
  spec.horizon = 1000;
  spec.candidates = {vec({1, 1, 1})};
  spec.stopping_epsilons = {0.5, 0.2};
  std::mt19937_64 rng(8);
  const auto full = run(spec, rng);
  spec.stride = 0;
  std::mt19937_64 rng2(8);
  const auto bare = run(spec, rng2);
  EXPECT_TRUE(bare.records.empty());
  for (std::size_t k = 0; k < 2; ++k) {
    const auto expect = stopping_time(full, spec.candidates, full.stopping[k].first);
    ASSERT_TRUE(expect.reached());
    EXPECT_EQ(bare.stopping[k].second.n, expect.n);
    EXPECT_EQ(bare.stopping[k].second.length, expect.length);
  }
}

TEST(ContinuousReference, RestPointIsConstant) {
  const auto g = cournot();
  const auto path = continuous_reference(*g, euclidean(*g), vec({1, 1, 1}), 1.0, 0.1, {vec({1, 1, 1})});
  ASSERT_EQ(path.t.size(), 11u);
  for (const auto& y : path.y) EXPECT_EQ(y, vec({1, 1, 1}));
  for (double f : path.fenchel[0]) EXPECT_EQ(f, 0.0);
  EXPECT_THROW(continuous_reference(*g, euclidean(*g), vec({1, 1, 1}), 0.01, 0.1, {}), UsageError);
}

TEST(ContinuousReference, LyapunovIdentityIsSecondOrder) {
  const auto g = cournot();
  const auto reg = euclidean(*g);
  const Vector y0 = vec({2.0, 0.5, 1.5});
  const auto coarse = validate::lyapunov_check(*g, reg, y0, vec({1, 1, 1}), 2.0, 2e-2);
  const auto fine = validate::lyapunov_check(*g, reg, y0, vec({1, 1, 1}), 2.0, 1e-2);
  EXPECT_GT(coarse.max_identity_error / fine.max_identity_error, 3.5);
  EXPECT_LT(coarse.max_identity_error / fine.max_identity_error, 4.5);
  EXPECT_LE(fine.max_increase, 0.0);
}

// Same seeded suites as `gameda validate noise|descent|lyapunov`.
TEST(EngineProperties, NoiseSuiteHolds) {
  for (const auto& p : validate::noise_suite(31)) EXPECT_TRUE(p.pass) << p.name << " worst slack " << p.worst_slack;
}

TEST(EngineProperties, DescentSuiteHolds) {
  for (const auto& p : validate::descent_suite(32)) EXPECT_TRUE(p.pass) << p.name << " worst slack " << p.worst_slack;
}

TEST(EngineProperties, LyapunovSuiteHolds) {
  for (const auto& p : validate::lyapunov_suite(33)) EXPECT_TRUE(p.pass) << p.name << " worst slack " << p.worst_slack;
}

}  // namespace
}  // namespace gameda
