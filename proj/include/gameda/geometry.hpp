#pragma once

// Compact convex action sets (boxes and scaled simplices), their products,
// Euclidean projections and tangent/polar cone queries.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gameda/types.hpp"

namespace gameda {

enum class SetKind { Box, ScaledSimplex };

class ConvexSet {
 public:
  static ConvexSet box(Vector lower, Vector upper) {
    if (lower.size() != upper.size() || lower.size() == 0)
      throw UsageError("box: bound vectors must be nonempty and of equal size");
    for (Eigen::Index k = 0; k < lower.size(); ++k) {
      if (!std::isfinite(lower[k]) || !std::isfinite(upper[k]) || lower[k] > upper[k])
        throw UsageError("box: need finite lower <= upper in every coordinate");
    }
    ConvexSet s;
    s.kind_ = SetKind::Box;
    s.dim_ = static_cast<int>(lower.size());
    s.lower_ = std::move(lower);
    s.upper_ = std::move(upper);
    return s;
  }

  static ConvexSet box(int dim, double lower, double upper) {
    return box(Vector::Constant(dim, lower), Vector::Constant(dim, upper));
  }

  static ConvexSet simplex(double scale, int dim) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw UsageError("simplex: scale must be positive");
    if (dim < 1) throw UsageError("simplex: dimension must be at least 1");
    ConvexSet s;
    s.kind_ = SetKind::ScaledSimplex;
    s.dim_ = dim;
    s.scale_ = scale;
    return s;
  }

  SetKind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_box() const { return kind_ == SetKind::Box; }
  bool is_simplex() const { return kind_ == SetKind::ScaledSimplex; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  double scale() const { return scale_; }

  bool contains(const Vector& x) const {
    check_dim(x, "contains");
    if (is_box()) {
      for (int k = 0; k < dim_; ++k) {
        if (!(x[k] >= lower_[k] - tol::kFeasible && x[k] <= upper_[k] + tol::kFeasible)) return false;
      }
      return true;
    }
    for (int k = 0; k < dim_; ++k) {
      if (!(x[k] >= -tol::kFeasible)) return false;
    }
    return std::abs(x.sum() - scale_) <= tol::kFeasible;
  }

  Vector project(const Vector& y) const {
    check_dim(y, "project");
    if (is_box()) return y.cwiseMax(lower_).cwiseMin(upper_);
    return project_simplex(y);
  }

  bool tangent_cone_contains(const Vector& x, const Vector& z) const {
    require_feasible(x, "tangent_cone_contains");
    check_dim(z, "tangent_cone_contains");
    if (is_box()) {
      for (int k = 0; k < dim_; ++k) {
        const bool at_lower = x[k] <= lower_[k] + tol::kFeasible;
        const bool at_upper = x[k] >= upper_[k] - tol::kFeasible;
        if (at_lower && z[k] < -tol::kCone) return false;
        if (at_upper && z[k] > tol::kCone) return false;
      }
      return true;
    }
    if (std::abs(z.sum()) > tol::kCone * (1.0 + z.lpNorm<1>())) return false;
    for (int k = 0; k < dim_; ++k) {
      if (x[k] <= tol::kFeasible && z[k] < -tol::kCone) return false;
    }
    return true;
  }

  bool polar_cone_contains(const Vector& x, const Vector& y) const {
    require_feasible(x, "polar_cone_contains");
    check_dim(y, "polar_cone_contains");
    for (const Vector& z : tangent_generators(x)) {
      if (y.dot(z) > tol::kCone) return false;
    }
    return true;
  }

  // Generators of the tangent cone at x; a lineality direction appears as a +/- pair.
  // Box rays are unit vectors; simplex rays are e_j - e_k with k in the support.
  std::vector<Vector> tangent_generators(const Vector& x) const {
    require_feasible(x, "tangent_generators");
    std::vector<Vector> rays;
    if (is_box()) {
      for (int k = 0; k < dim_; ++k) {
        if (upper_[k] - lower_[k] <= tol::kFeasible) continue;
        if (x[k] > lower_[k] + tol::kFeasible) rays.push_back(-Vector::Unit(dim_, k));
        if (x[k] < upper_[k] - tol::kFeasible) rays.push_back(Vector::Unit(dim_, k));
      }
      return rays;
    }
    for (int k = 0; k < dim_; ++k) {
      if (x[k] <= tol::kFeasible) continue;
      for (int j = 0; j < dim_; ++j) {
        if (j == k) continue;
        Vector z = Vector::Zero(dim_);
        z[j] = 1.0;
        z[k] = -1.0;
        rays.push_back(std::move(z));
      }
    }
    return rays;
  }

  // Orthonormal basis (columns) of the linear span of the tangent cone at x.
  Matrix tangent_span(const Vector& x) const {
    const auto rays = tangent_generators(x);
    return orthonormal_span(rays, dim_);
  }

  template <class Rng>
  Vector sample(Rng& rng) const {
    Vector x(dim_);
    if (is_box()) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int k = 0; k < dim_; ++k) x[k] = lower_[k] + (upper_[k] - lower_[k]) * u(rng);
      return x;
    }
    std::exponential_distribution<double> e(1.0);
    for (int k = 0; k < dim_; ++k) x[k] = e(rng);
    x *= scale_ / x.sum();
    return x;
  }

  // Random nonzero direction of the tangent cone at x (zero if the cone is {0}).
  template <class Rng>
  Vector sample_tangent(const Vector& x, Rng& rng) const {
    const auto rays = tangent_generators(x);
    Vector z = Vector::Zero(dim_);
    if (rays.empty()) return z;
    std::exponential_distribution<double> e(1.0);
    std::bernoulli_distribution sparse(0.5);
    for (const Vector& r : rays) {
      if (sparse(rng)) z += e(rng) * r;
    }
    if (z.norm() == 0.0) z = rays[std::uniform_int_distribution<std::size_t>(0, rays.size() - 1)(rng)];
    return z;
  }

  double diameter() const {
    if (is_box()) return (upper_ - lower_).norm();
    return dim_ >= 2 ? scale_ * std::sqrt(2.0) : 0.0;
  }

  static Matrix orthonormal_span(const std::vector<Vector>& vectors, int dim) {
    if (vectors.empty()) return Matrix(dim, 0);
    Matrix g(dim, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t c = 0; c < vectors.size(); ++c) g.col(static_cast<Eigen::Index>(c)) = vectors[c];
    Eigen::ColPivHouseholderQR<Matrix> qr(g);
    qr.setThreshold(1e-10);
    const Eigen::Index rank = qr.rank();
    Matrix q = qr.householderQ();
    return q.leftCols(rank);
  }

 private:
  ConvexSet() = default;

  void check_dim(const Vector& v, const char* what) const {
    if (v.size() != dim_)
      throw UsageError(std::string(what) + ": dimension " + std::to_string(v.size()) + " != set dimension " +
                       std::to_string(dim_));
  }

  void require_feasible(const Vector& x, const char* what) const {
    check_dim(x, what);
    if (!contains(x)) throw UsageError(std::string(what) + ": base point is infeasible");
  }

  // Sort-and-threshold projection onto {x >= 0, sum x = scale}, re-normalized so
  // the sum constraint holds to rounding.
  Vector project_simplex(const Vector& y) const {
    std::vector<double> sorted(y.data(), y.data() + dim_);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (int k = 0; k < dim_; ++k) {
      cumulative += sorted[static_cast<std::size_t>(k)];
      const double t = (cumulative - scale_) / (k + 1);
      if (sorted[static_cast<std::size_t>(k)] - t > 0.0) threshold = t;
    }
    Vector x = (y.array() - threshold).max(0.0).matrix();
    const double total = x.sum();
    if (total > 0.0 && total != scale_) x *= scale_ / total;
    return x;
  }

  SetKind kind_ = SetKind::Box;
  int dim_ = 0;
  Vector lower_;
  Vector upper_;
  double scale_ = 1.0;
};

// Product of per-player sets; joint vectors are the concatenation of blocks.
class ProductSet {
 public:
  ProductSet() = default;

  explicit ProductSet(std::vector<ConvexSet> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw UsageError("product set needs at least one factor");
    offsets_.reserve(factors_.size());
    int offset = 0;
    for (const auto& f : factors_) {
      offsets_.push_back(offset);
      offset += f.dim();
    }
    dim_ = offset;
  }

  int players() const { return static_cast<int>(factors_.size()); }
  int dim() const { return dim_; }
  const ConvexSet& factor(int i) const { return factors_.at(static_cast<std::size_t>(i)); }
  const std::vector<ConvexSet>& factors() const { return factors_; }
  int offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }

  auto block(const Vector& x, int i) const { return x.segment(offset(i), factor(i).dim()); }
  auto block(Vector& x, int i) const { return x.segment(offset(i), factor(i).dim()); }

  bool contains(const Vector& x) const {
    check_dim(x);
    for (int i = 0; i < players(); ++i) {
      if (!factor(i).contains(block(x, i))) return false;
    }
    return true;
  }

  Vector project(const Vector& y) const {
    check_dim(y);
    Vector x(dim_);
    for (int i = 0; i < players(); ++i) block(x, i) = factor(i).project(block(y, i));
    return x;
  }

  bool tangent_cone_contains(const Vector& x, const Vector& z) const {
    check_dim(x);
    check_dim(z);
    for (int i = 0; i < players(); ++i) {
      if (!factor(i).tangent_cone_contains(block(x, i), block(z, i))) return false;
    }
    return true;
  }

  // The polar cone of a product is the product of the polar cones.
  bool polar_cone_contains(const Vector& x, const Vector& y) const {
    check_dim(x);
    check_dim(y);
    for (int i = 0; i < players(); ++i) {
      if (!factor(i).polar_cone_contains(block(x, i), block(y, i))) return false;
    }
    return true;
  }

  std::vector<Vector> tangent_generators(const Vector& x) const {
    check_dim(x);
    std::vector<Vector> rays;
    for (int i = 0; i < players(); ++i) {
      for (const Vector& r : factor(i).tangent_generators(block(x, i))) {
        Vector z = Vector::Zero(dim_);
        block(z, i) = r;
        rays.push_back(std::move(z));
      }
    }
    return rays;
  }

  Matrix tangent_span(const Vector& x) const {
    return ConvexSet::orthonormal_span(tangent_generators(x), dim_);
  }

  template <class Rng>
  Vector sample(Rng& rng) const {
    Vector x(dim_);
    for (int i = 0; i < players(); ++i) block(x, i) = factor(i).sample(rng);
    return x;
  }

  template <class Rng>
  Vector sample_tangent(const Vector& x, Rng& rng) const {
    check_dim(x);
    Vector z(dim_);
    for (int i = 0; i < players(); ++i) block(z, i) = factor(i).sample_tangent(block(x, i), rng);
    return z;
  }

  double diameter() const {
    double sq = 0.0;
    for (const auto& f : factors_) sq += f.diameter() * f.diameter();
    return std::sqrt(sq);
  }

 private:
  void check_dim(const Vector& v) const {
    if (v.size() != dim_)
      throw UsageError("product set: dimension " + std::to_string(v.size()) + " != " + std::to_string(dim_));
  }

  std::vector<ConvexSet> factors_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

}  // namespace gameda
