#pragma once

// Game interface (payoffs, individual gradient field, game Hessian) and the
// concrete games: Cournot oligopoly, atomic splittable congestion games, mixed
// extensions of finite games, bilinear zero-sum games and a non-monotone
// single-player game with a globally stable maximizer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gameda/geometry.hpp"
#include "gameda/types.hpp"

namespace gameda {

// Largest Euclidean norm of a point in the set.
inline double max_norm(const ConvexSet& set) {
  if (set.is_simplex()) return set.scale();
  return set.lower().cwiseAbs().cwiseMax(set.upper().cwiseAbs()).norm();
}

class Game {
 public:
  virtual ~Game() = default;

  virtual std::string name() const = 0;

  const ProductSet& action_space() const { return space_; }
  int players() const { return space_.players(); }
  int dim() const { return space_.dim(); }

  double payoff(int i, const Vector& x) const {
    require_feasible(x, "payoff");
    if (i < 0 || i >= players()) throw UsageError("payoff: player index out of range");
    return payoff_ambient(i, x);
  }

  Vector gradient(const Vector& x) const {
    require_feasible(x, "gradient");
    return gradient_ambient(x);
  }

  // Payoff and gradient formulas extended to the ambient coordinate space
  // (used for finite differences that leave the action set).
  virtual double payoff_ambient(int i, const Vector& x) const = 0;
  virtual Vector gradient_ambient(const Vector& x) const = 0;

  virtual bool has_hessian() const { return false; }

  // Jacobian of the gradient field: J(a, b) = d v_a / d x_b.
  virtual Matrix gradient_jacobian(const Vector&) const {
    throw NotImplementedError(name() + ": no closed-form second derivatives");
  }

  // H_ij = (1/2) d_j d_i u_i + (1/2) (d_i d_j u_j)^T, i.e. the symmetric part of the Jacobian.
  Matrix hessian(const Vector& x) const {
    require_feasible(x, "hessian");
    const Matrix j = gradient_jacobian(x);
    return 0.5 * (j + j.transpose());
  }

  // Upper bound on sup_x |v(x)|_2 over the action set; also bounds the L-inf dual norm.
  virtual double gradient_bound() const = 0;

 protected:
  explicit Game(ProductSet space) : space_(std::move(space)) {}

  void require_feasible(const Vector& x, const char* what) const {
    if (x.size() != dim()) throw UsageError(std::string(what) + ": dimension mismatch");
    if (!space_.contains(x)) throw UsageError(std::string(what) + ": action profile is infeasible");
  }

 private:
  ProductSet space_;
};

using GamePtr = std::shared_ptr<const Game>;

// u_i(x) = x_i (a - sum_j b_j x_j) - c_i x_i on prod_i [0, C_i].
class CournotGame final : public Game {
 public:
  CournotGame(double a, Vector b, Vector c, Vector capacity)
      : Game(make_space(capacity)), a_(a), b_(std::move(b)), c_(std::move(c)), cap_(std::move(capacity)) {
    const auto n = cap_.size();
    if (b_.size() != n || c_.size() != n) throw UsageError("cournot: b, c, capacity must have one entry per firm");
    if (!(a > 0.0)) throw UsageError("cournot: a must be positive");
    if ((b_.array() <= 0.0).any()) throw UsageError("cournot: b must be positive");
  }

  static CournotGame symmetric(int n, double a, double b, double c, double capacity) {
    return CournotGame(a, Vector::Constant(n, b), Vector::Constant(n, c), Vector::Constant(n, capacity));
  }

  std::string name() const override { return "cournot"; }

  double a() const { return a_; }
  const Vector& b() const { return b_; }
  const Vector& c() const { return c_; }
  const Vector& capacity() const { return cap_; }

  double payoff_ambient(int i, const Vector& x) const override {
    return x[i] * (a_ - b_.dot(x)) - c_[i] * x[i];
  }

  Vector gradient_ambient(const Vector& x) const override {
    const double price = a_ - b_.dot(x);
    return (price - c_.array() - b_.array() * x.array()).matrix();
  }

  bool has_hessian() const override { return true; }

  Matrix gradient_jacobian(const Vector&) const override {
    const auto n = b_.size();
    Matrix j = -Vector::Ones(n) * b_.transpose();
    j.diagonal() -= b_;
    return j;
  }

  double gradient_bound() const override {
    const double full = b_.dot(cap_);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < b_.size(); ++i) {
      const double hi = std::abs(a_ - c_[i]);
      const double lo = std::abs(a_ - c_[i] - full - b_[i] * cap_[i]);
      sq += std::max(hi, lo) * std::max(hi, lo);
    }
    return std::sqrt(sq);
  }

  // Symmetric interior equilibrium x_i = (a - c) / ((N + 1) b), when it exists.
  bool has_symmetric_interior_equilibrium() const {
    const auto n = b_.size();
    if (!(b_.array() == b_[0]).all() || !(c_.array() == c_[0]).all() || !(cap_.array() == cap_[0]).all())
      return false;
    const double q = (a_ - c_[0]) / ((static_cast<double>(n) + 1.0) * b_[0]);
    return q > 0.0 && q < cap_[0];
  }

  Vector symmetric_equilibrium() const {
    if (!has_symmetric_interior_equilibrium()) throw UsageError("cournot: no symmetric interior equilibrium");
    const auto n = b_.size();
    return Vector::Constant(n, (a_ - c_[0]) / ((static_cast<double>(n) + 1.0) * b_[0]));
  }

 private:
  static ProductSet make_space(const Vector& capacity) {
    if (capacity.size() == 0) throw UsageError("cournot: need at least one firm");
    std::vector<ConvexSet> sets;
    for (Eigen::Index i = 0; i < capacity.size(); ++i) sets.push_back(ConvexSet::box(1, 0.0, capacity[i]));
    return ProductSet(std::move(sets));
  }

  double a_;
  Vector b_;
  Vector c_;
  Vector cap_;
};

// Atomic splittable congestion game with affine resource costs c_r(w) = alpha_r + beta_r w.
class CongestionGame final : public Game {
 public:
  struct Resource {
    std::string name;
    double alpha = 0.0;
    double beta = 0.0;
  };
  struct Path {
    std::string name;
    std::vector<int> resources;
  };
  struct Player {
    double load = 1.0;
    std::vector<Path> paths;
  };

  CongestionGame(std::vector<Resource> resources, std::vector<Player> players)
      : Game(make_space(players)), resources_(std::move(resources)), players_(std::move(players)) {
    for (const auto& r : resources_) {
      if (r.alpha < 0.0 || r.beta < 0.0) throw UsageError("congestion: resource '" + r.name + "' needs alpha, beta >= 0");
    }
    for (const auto& p : players_) {
      for (const auto& path : p.paths) {
        for (int r : path.resources) {
          if (r < 0 || r >= static_cast<int>(resources_.size()))
            throw UsageError("congestion: path '" + path.name + "' references an unknown resource");
        }
      }
    }
  }

  std::string name() const override { return "congestion"; }
  const std::vector<Resource>& resources() const { return resources_; }
  const std::vector<Player>& player_data() const { return players_; }

  Vector demands(const Vector& x) const {
    Vector w = Vector::Zero(static_cast<Eigen::Index>(resources_.size()));
    for_each_path([&](int, int, int flat, const Path& path) {
      for (int r : path.resources) w[r] += x[flat];
    });
    return w;
  }

  double cost(int i, const Vector& x) const {
    const Vector w = demands(x);
    double total = 0.0;
    for_each_path([&](int player, int, int flat, const Path& path) {
      if (player == i) total += x[flat] * path_cost(path, w);
    });
    return total;
  }

  double payoff_ambient(int i, const Vector& x) const override { return -cost(i, x); }

  // -dc_i/dx_ip = -[ sum_{r in p} c_r(w_r) + sum_{p'} x_ip' sum_{r in p & p'} beta_r ].
  Vector gradient_ambient(const Vector& x) const override {
    const Vector w = demands(x);
    Vector v(dim());
    for_each_path([&](int i, int, int flat, const Path& path) {
      double g = path_cost(path, w);
      for_each_path([&](int j, int, int other, const Path& path2) {
        if (j == i) g += x[other] * shared_beta(path, path2);
      });
      v[flat] = -g;
    });
    return v;
  }

  bool has_hessian() const override { return true; }

  Matrix gradient_jacobian(const Vector&) const override {
    Matrix jac(dim(), dim());
    for_each_path([&](int i, int, int a, const Path& p) {
      for_each_path([&](int j, int, int b, const Path& q) {
        jac(a, b) = -(i == j ? 2.0 : 1.0) * shared_beta(p, q);
      });
    });
    return jac;
  }

  double gradient_bound() const override {
    double total_load = 0.0;
    for (const auto& p : players_) total_load += p.load;
    double sq = 0.0;
    for_each_path([&](int i, int, int, const Path& path) {
      double g = 0.0;
      for (int r : path.resources) {
        const auto& res = resources_[static_cast<std::size_t>(r)];
        g += res.alpha + res.beta * total_load + res.beta * players_[static_cast<std::size_t>(i)].load;
      }
      sq += g * g;
    });
    return std::sqrt(sq);
  }

 private:
  static ProductSet make_space(const std::vector<Player>& players) {
    if (players.empty()) throw UsageError("congestion: need at least one player");
    std::vector<ConvexSet> sets;
    for (const auto& p : players) {
      if (p.paths.empty()) throw UsageError("congestion: every player needs at least one path");
      sets.push_back(ConvexSet::simplex(p.load, static_cast<int>(p.paths.size())));
    }
    return ProductSet(std::move(sets));
  }

  template <class F>
  void for_each_path(F&& f) const {
    int flat = 0;
    for (int i = 0; i < static_cast<int>(players_.size()); ++i) {
      const auto& paths = players_[static_cast<std::size_t>(i)].paths;
      for (int k = 0; k < static_cast<int>(paths.size()); ++k) f(i, k, flat++, paths[static_cast<std::size_t>(k)]);
    }
  }

  double path_cost(const Path& path, const Vector& w) const {
    double c = 0.0;
    for (int r : path.resources) {
      const auto& res = resources_[static_cast<std::size_t>(r)];
      c += res.alpha + res.beta * w[r];
    }
    return c;
  }

  double shared_beta(const Path& p, const Path& q) const {
    double s = 0.0;
    for (int r : p.resources) {
      for (int r2 : q.resources) {
        if (r == r2) s += resources_[static_cast<std::size_t>(r)].beta;
      }
    }
    return s;
  }

  std::vector<Resource> resources_;
  std::vector<Player> players_;
};

// Mixed extension of a finite game with dense payoff tensors.
// Pure profiles are flattened row-major (last player varies fastest).
class FiniteGame final : public Game {
 public:
  FiniteGame(std::vector<int> strategies, std::vector<std::vector<double>> payoffs)
      : Game(make_space(strategies)), strategies_(std::move(strategies)), payoffs_(std::move(payoffs)) {
    const int n = static_cast<int>(strategies_.size());
    strides_.assign(strategies_.size(), 1);
    for (int i = n - 2; i >= 0; --i)
      strides_[static_cast<std::size_t>(i)] = strides_[static_cast<std::size_t>(i + 1)] * strategies_[static_cast<std::size_t>(i + 1)];
    profiles_ = strides_[0] * strategies_[0];
    if (static_cast<int>(payoffs_.size()) != n) throw UsageError("finite game: need one payoff tensor per player");
    for (const auto& t : payoffs_) {
      if (static_cast<int>(t.size()) != profiles_) throw UsageError("finite game: payoff tensor has wrong size");
    }
  }

  // Two-player zero-sum matrix game: u_1 = A, u_2 = -A.
  static FiniteGame zero_sum(const Matrix& a) {
    const int m = static_cast<int>(a.rows());
    const int k = static_cast<int>(a.cols());
    std::vector<std::vector<double>> u(2, std::vector<double>(static_cast<std::size_t>(m * k)));
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < k; ++c) {
        u[0][static_cast<std::size_t>(r * k + c)] = a(r, c);
        u[1][static_cast<std::size_t>(r * k + c)] = -a(r, c);
      }
    }
    return FiniteGame({m, k}, std::move(u));
  }

  // Two-player bimatrix game: rows are player 1's strategies.
  static FiniteGame bimatrix(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw UsageError("bimatrix: shape mismatch");
    const int m = static_cast<int>(a.rows());
    const int k = static_cast<int>(a.cols());
    std::vector<std::vector<double>> u(2, std::vector<double>(static_cast<std::size_t>(m * k)));
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < k; ++c) {
        u[0][static_cast<std::size_t>(r * k + c)] = a(r, c);
        u[1][static_cast<std::size_t>(r * k + c)] = b(r, c);
      }
    }
    return FiniteGame({m, k}, std::move(u));
  }

  std::string name() const override { return "finite"; }

  const std::vector<int>& strategies() const { return strategies_; }
  int profile_count() const { return profiles_; }

  int profile_index(const std::vector<int>& profile) const {
    if (profile.size() != strategies_.size()) throw UsageError("finite game: profile has wrong arity");
    int idx = 0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      if (profile[i] < 0 || profile[i] >= strategies_[i]) throw UsageError("finite game: strategy out of range");
      idx += profile[i] * strides_[i];
    }
    return idx;
  }

  std::vector<int> profile_of(int index) const {
    std::vector<int> p(strategies_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (index / strides_[i]) % strategies_[i];
    return p;
  }

  double pure_payoff(int i, const std::vector<int>& profile) const {
    return payoffs_.at(static_cast<std::size_t>(i))[static_cast<std::size_t>(profile_index(profile))];
  }

  // Vertex of the mixed strategy space for a pure profile.
  Vector vertex(const std::vector<int>& profile) const {
    Vector x = Vector::Zero(dim());
    profile_index(profile);
    for (int i = 0; i < players(); ++i) x[action_space().offset(i) + profile[static_cast<std::size_t>(i)]] = 1.0;
    return x;
  }

  double payoff_ambient(int i, const Vector& x) const override {
    double u = 0.0;
    for (int idx = 0; idx < profiles_; ++idx) {
      const auto prof = profile_of(idx);
      double w = 1.0;
      for (int j = 0; j < players(); ++j) w *= x[action_space().offset(j) + prof[static_cast<std::size_t>(j)]];
      u += w * payoffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)];
    }
    return u;
  }

  // v_i(a) = u_i(a; x_-i): the payoff vector of player i.
  Vector gradient_ambient(const Vector& x) const override {
    Vector v = Vector::Zero(dim());
    for (int idx = 0; idx < profiles_; ++idx) {
      const auto prof = profile_of(idx);
      for (int i = 0; i < players(); ++i) {
        double w = 1.0;
        for (int j = 0; j < players(); ++j) {
          if (j != i) w *= x[action_space().offset(j) + prof[static_cast<std::size_t>(j)]];
        }
        v[action_space().offset(i) + prof[static_cast<std::size_t>(i)]] +=
            w * payoffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)];
      }
    }
    return v;
  }

  bool has_hessian() const override { return true; }

  Matrix gradient_jacobian(const Vector& x) const override {
    Matrix jac = Matrix::Zero(dim(), dim());
    for (int idx = 0; idx < profiles_; ++idx) {
      const auto prof = profile_of(idx);
      for (int i = 0; i < players(); ++i) {
        const int row = action_space().offset(i) + prof[static_cast<std::size_t>(i)];
        for (int j = 0; j < players(); ++j) {
          if (j == i) continue;
          double w = 1.0;
          for (int k = 0; k < players(); ++k) {
            if (k != i && k != j) w *= x[action_space().offset(k) + prof[static_cast<std::size_t>(k)]];
          }
          const int col = action_space().offset(j) + prof[static_cast<std::size_t>(j)];
          jac(row, col) += w * payoffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(idx)];
        }
      }
    }
    return jac;
  }

  double gradient_bound() const override {
    double sq = 0.0;
    for (int i = 0; i < players(); ++i) {
      double m = 0.0;
      for (double u : payoffs_[static_cast<std::size_t>(i)]) m = std::max(m, std::abs(u));
      sq += m * m * strategies_[static_cast<std::size_t>(i)];
    }
    return std::sqrt(sq);
  }

  // Largest |u_i| over all players and profiles.
  double payoff_range() const {
    double lo = payoffs_[0][0];
    double hi = lo;
    for (const auto& t : payoffs_) {
      for (double u : t) {
        lo = std::min(lo, u);
        hi = std::max(hi, u);
      }
    }
    return hi - lo;
  }

  // Draw alpha_j ~ x_j independently and return the realized payoff vectors
  // (u_i(a; alpha_-i))_a for every player.
  template <class Rng>
  Vector sample_payoff_vectors(const Vector& x, Rng& rng) const {
    std::vector<int> drawn(strategies_.size());
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int j = 0; j < players(); ++j) {
      const double r = unif(rng);
      const int k = strategies_[static_cast<std::size_t>(j)];
      const int off = action_space().offset(j);
      const double total = x.segment(off, k).sum();
      double acc = 0.0;
      int pick = k - 1;
      for (int a = 0; a < k; ++a) {
        acc += x[off + a] / total;
        if (r < acc) {
          pick = a;
          break;
        }
      }
      // Never pick a zero-probability strategy through the rounding fallback.
      while (x[off + pick] <= 0.0 && pick > 0) --pick;
      drawn[static_cast<std::size_t>(j)] = pick;
    }
    Vector v(dim());
    for (int i = 0; i < players(); ++i) {
      std::vector<int> prof = drawn;
      for (int a = 0; a < strategies_[static_cast<std::size_t>(i)]; ++a) {
        prof[static_cast<std::size_t>(i)] = a;
        v[action_space().offset(i) + a] = pure_payoff(i, prof);
      }
    }
    return v;
  }

 private:
  static ProductSet make_space(const std::vector<int>& strategies) {
    if (strategies.empty()) throw UsageError("finite game: need at least one player");
    std::vector<ConvexSet> sets;
    for (int k : strategies) {
      if (k < 1) throw UsageError("finite game: every player needs at least one strategy");
      sets.push_back(ConvexSet::simplex(1.0, k));
    }
    return ProductSet(std::move(sets));
  }

  std::vector<int> strategies_;
  std::vector<std::vector<double>> payoffs_;
  std::vector<int> strides_;
  int profiles_ = 0;
};

// u_A(x_A, x_B) = x_A^T A x_B, u_B = -u_A.
class BilinearZeroSumGame final : public Game {
 public:
  BilinearZeroSumGame(Matrix a, ConvexSet set_a, ConvexSet set_b)
      : Game(ProductSet({std::move(set_a), std::move(set_b)})), a_(std::move(a)) {
    if (a_.rows() != action_space().factor(0).dim() || a_.cols() != action_space().factor(1).dim())
      throw UsageError("bilinear zero-sum: matrix shape does not match the action sets");
  }

  // Matrix game over unit simplices.
  static BilinearZeroSumGame matrix_game(Matrix a) {
    const int m = static_cast<int>(a.rows());
    const int k = static_cast<int>(a.cols());
    return BilinearZeroSumGame(std::move(a), ConvexSet::simplex(1.0, m), ConvexSet::simplex(1.0, k));
  }

  std::string name() const override { return "bilinear"; }
  const Matrix& matrix() const { return a_; }

  double payoff_ambient(int i, const Vector& x) const override {
    const auto xa = x.head(a_.rows());
    const auto xb = x.tail(a_.cols());
    const double u = xa.dot(a_ * xb);
    return i == 0 ? u : -u;
  }

  Vector gradient_ambient(const Vector& x) const override {
    Vector v(dim());
    v.head(a_.rows()) = a_ * x.tail(a_.cols());
    v.tail(a_.cols()) = -a_.transpose() * x.head(a_.rows());
    return v;
  }

  bool has_hessian() const override { return true; }

  Matrix gradient_jacobian(const Vector&) const override {
    Matrix j = Matrix::Zero(dim(), dim());
    j.topRightCorner(a_.rows(), a_.cols()) = a_;
    j.bottomLeftCorner(a_.cols(), a_.rows()) = -a_.transpose();
    return j;
  }

  double gradient_bound() const override {
    const double fro = a_.norm();
    const double na = max_norm(action_space().factor(0));
    const double nb = max_norm(action_space().factor(1));
    return std::sqrt(fro * fro * (na * na + nb * nb));
  }

 private:
  Matrix a_;
};

// u(x) = 1 - sum_l sqrt(1 + x_l) on [0,1]^d: globally stable at the origin but not monotone for d >= 2.
class NonConcaveStableGame final : public Game {
 public:
  explicit NonConcaveStableGame(int d) : Game(ProductSet({ConvexSet::box(d, 0.0, 1.0)})), d_(d) {}

  std::string name() const override { return "nonconcave"; }

  double payoff_ambient(int, const Vector& x) const override {
    return 1.0 - (1.0 + x.array()).sqrt().sum();
  }

  Vector gradient_ambient(const Vector& x) const override {
    return (-0.5 / (1.0 + x.array()).sqrt()).matrix();
  }

  bool has_hessian() const override { return true; }

  Matrix gradient_jacobian(const Vector& x) const override {
    return (0.25 * (1.0 + x.array()).pow(-1.5)).matrix().asDiagonal();
  }

  double gradient_bound() const override { return 0.5 * std::sqrt(static_cast<double>(d_)); }

 private:
  int d_;
};

// Single player, u(x) = -curvature |x|^2 + <linear, x> on an arbitrary set.
class ConcaveQuadraticGame final : public Game {
 public:
  ConcaveQuadraticGame(ConvexSet set, double curvature, Vector linear)
      : Game(ProductSet({std::move(set)})), curvature_(curvature), linear_(std::move(linear)) {
    if (linear_.size() != dim()) throw UsageError("quadratic game: linear term dimension mismatch");
    if (curvature_ < 0.0) throw UsageError("quadratic game: curvature must be nonnegative");
  }

  std::string name() const override { return "quadratic"; }

  double payoff_ambient(int, const Vector& x) const override {
    return -curvature_ * x.squaredNorm() + linear_.dot(x);
  }

  Vector gradient_ambient(const Vector& x) const override { return -2.0 * curvature_ * x + linear_; }

  bool has_hessian() const override { return true; }

  Matrix gradient_jacobian(const Vector&) const override {
    return -2.0 * curvature_ * Matrix::Identity(dim(), dim());
  }

  double gradient_bound() const override {
    return linear_.norm() + 2.0 * curvature_ * max_norm(action_space().factor(0));
  }

 private:
  double curvature_;
  Vector linear_;
};

}  // namespace gameda
