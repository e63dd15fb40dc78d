#pragma once

// Monte Carlo estimate of how often the Cournot game Hessian
// H_ij = -b_i delta_ij - (b_i + b_j)/2 is negative definite for b_i ~ U[0, 1].

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Cholesky>

#include "gameda/engine.hpp"
#include "gameda/games.hpp"
#include "gameda/types.hpp"

namespace gameda {

inline Matrix cournot_hessian(const Vector& b) {
  const auto n = b.size();
  Matrix h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = -0.5 * (b[i] + b[j]) - (i == j ? b[i] : 0.0);
  }
  return h;
}

// -H positive definite <=> Cholesky succeeds.
inline bool negative_definite(const Matrix& h) {
  const Eigen::LLT<Matrix> llt(-h);
  return llt.info() == Eigen::Success;
}

struct HessianFraction {
  int players = 0;
  long samples = 0;
  long negative_definite = 0;
  double fraction() const { return samples > 0 ? static_cast<double>(negative_definite) / samples : 0.0; }
};

// `symmetric` forces b_1 = ... = b_N (one draw per sample).
inline HessianFraction montecarlo_hessian(int players, long samples, std::uint64_t seed, bool symmetric = false) {
  if (players < 1) throw UsageError("montecarlo-hessian: N must be >= 1");
  if (samples < 1) throw UsageError("montecarlo-hessian: samples must be >= 1");
  auto rng = trial_rng(seed, static_cast<std::uint64_t>(players));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HessianFraction out{players, samples, 0};
  Vector b(players);
  for (long s = 0; s < samples; ++s) {
    if (symmetric) {
      b.setConstant(u(rng));
    } else {
      for (int i = 0; i < players; ++i) b[i] = u(rng);
    }
    if (negative_definite(cournot_hessian(b))) ++out.negative_definite;
  }
  return out;
}

}  // namespace gameda
