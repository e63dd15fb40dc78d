#pragma once

// Penalty functions, their conjugates and choice (mirror) maps, Bregman
// divergence and Fenchel coupling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gameda/geometry.hpp"
#include "gameda/types.hpp"

namespace gameda {

enum class RegularizerKind { Euclidean, Entropic };
enum class NormKind { L1, L2 };

inline std::string to_string(RegularizerKind k) {
  return k == RegularizerKind::Euclidean ? "euclidean" : "entropic";
}

namespace detail {

// log(sum exp(y)) with max-shift.
inline double log_sum_exp(const Vector& y) {
  const double m = y.maxCoeff();
  return m + std::log((y.array() - m).exp().sum());
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

class Regularizer {
 public:
  // h(x) = |x|^2 / 2; 1-strongly convex w.r.t. L2. Choice map is the Euclidean projection.
  static Regularizer euclidean(ConvexSet set) {
    return Regularizer(RegularizerKind::Euclidean, std::move(set), 1.0, NormKind::L2);
  }

  // h(x) = sum x log x on a scaled simplex; (1/scale)-strongly convex w.r.t. L1.
  static Regularizer entropic(ConvexSet set) {
    if (!set.is_simplex()) throw UsageError("entropic regularizer requires a simplex action set");
    const double k = 1.0 / set.scale();
    return Regularizer(RegularizerKind::Entropic, std::move(set), k, NormKind::L1);
  }

  RegularizerKind kind() const { return kind_; }
  const ConvexSet& set() const { return set_; }
  double strong_convexity() const { return k_; }
  NormKind norm() const { return norm_; }
  bool steep() const { return kind_ == RegularizerKind::Entropic; }
  bool surjective() const { return kind_ == RegularizerKind::Euclidean; }

  double primal_norm(const Vector& z) const { return norm_ == NormKind::L2 ? z.norm() : z.lpNorm<1>(); }
  double dual_norm(const Vector& y) const {
    return norm_ == NormKind::L2 ? y.norm() : y.lpNorm<Eigen::Infinity>();
  }

  double penalty(const Vector& x) const {
    if (!set_.contains(x)) throw UsageError("penalty: point is infeasible");
    if (kind_ == RegularizerKind::Euclidean) return 0.5 * x.squaredNorm();
    double h = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) h += detail::xlogx(x[k]);
    return h;
  }

  double conjugate(const Vector& y) const {
    check_dim(y);
    if (kind_ == RegularizerKind::Euclidean) {
      const Vector x = set_.project(y);
      return y.dot(x) - 0.5 * x.squaredNorm();
    }
    const double rho = set_.scale();
    return rho * detail::log_sum_exp(y) - rho * std::log(rho);
  }

  Vector choice(const Vector& y) const {
    check_dim(y);
    if (kind_ == RegularizerKind::Euclidean) return set_.project(y);
    const double m = y.maxCoeff();
    Vector w = (y.array() - m).exp().matrix();
    return w * (set_.scale() / w.sum());
  }

  // Dual point mapped onto x by the choice map (x interior for the entropic kind).
  Vector dual_witness(const Vector& x) const {
    if (!set_.contains(x)) throw UsageError("dual_witness: point is infeasible");
    if (kind_ == RegularizerKind::Euclidean) return x;
    if ((x.array() <= 0.0).any()) throw UsageError("dual_witness: entropic preimage needs an interior point");
    return x.array().log().matrix();
  }

  // h(p) - h(x) - h'(x; p - x).
  double bregman(const Vector& p, const Vector& x) const {
    if (!set_.contains(p) || !set_.contains(x)) throw UsageError("bregman: point is infeasible");
    if (kind_ == RegularizerKind::Euclidean) return 0.5 * (p - x).squaredNorm();
    double d = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      if (p[k] <= 0.0) continue;
      if (x[k] <= 0.0) throw DivergenceUndefined("bregman: support of p not contained in support of x");
      d += p[k] * std::log(p[k] / x[k]);
    }
    return d - (p.sum() - x.sum());
  }

  // h(p) + h*(y) - <y, p>, evaluated in a cancellation-free form.
  double fenchel(const Vector& p, const Vector& y) const {
    if (!set_.contains(p)) throw UsageError("fenchel: point is infeasible");
    check_dim(y);
    if (kind_ == RegularizerKind::Euclidean) {
      const Vector x = set_.project(y);
      return 0.5 * (p - x).squaredNorm() + (y - x).dot(x - p);
    }
    const double shift = std::log(set_.scale()) - detail::log_sum_exp(y);
    double f = 0.0;
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      if (p[k] <= 0.0) continue;
      f += p[k] * (std::log(p[k]) - (y[k] + shift));
    }
    return f;
  }

  // max h - min h over the set.
  double range() const {
    if (kind_ == RegularizerKind::Entropic) return set_.scale() * std::log(static_cast<double>(set_.dim()));
    if (set_.is_simplex()) {
      const double rho = set_.scale();
      return 0.5 * rho * rho * (1.0 - 1.0 / set_.dim());
    }
    const Vector& lo = set_.lower();
    const Vector& hi = set_.upper();
    const double hmax = 0.5 * lo.cwiseAbs2().cwiseMax(hi.cwiseAbs2()).sum();
    const double hmin = 0.5 * Vector::Zero(lo.size()).cwiseMax(lo).cwiseMin(hi).squaredNorm();
    return hmax - hmin;
  }

 private:
  Regularizer(RegularizerKind kind, ConvexSet set, double k, NormKind norm)
      : kind_(kind), set_(std::move(set)), k_(k), norm_(norm) {}

  void check_dim(const Vector& y) const {
    if (y.size() != set_.dim()) throw UsageError("regularizer: dual vector dimension mismatch");
  }

  RegularizerKind kind_;
  ConvexSet set_;
  double k_;
  NormKind norm_;
};

// h(x) = sum_i h_i(x_i) over a product set; aggregate constant K = min_i K_i,
// joint norms are the Euclidean combination of the per-player norms.
class ProductRegularizer {
 public:
  ProductRegularizer() = default;

  explicit ProductRegularizer(std::vector<Regularizer> regs) : regs_(std::move(regs)) {
    if (regs_.empty()) throw UsageError("product regularizer needs at least one factor");
    std::vector<ConvexSet> sets;
    sets.reserve(regs_.size());
    k_ = std::numeric_limits<double>::infinity();
    for (const auto& r : regs_) {
      sets.push_back(r.set());
      k_ = std::min(k_, r.strong_convexity());
    }
    space_ = ProductSet(std::move(sets));
  }

  // Same kind for every player of a product set.
  static ProductRegularizer uniform(RegularizerKind kind, const ProductSet& space) {
    std::vector<Regularizer> regs;
    for (const auto& f : space.factors())
      regs.push_back(kind == RegularizerKind::Euclidean ? Regularizer::euclidean(f) : Regularizer::entropic(f));
    return ProductRegularizer(std::move(regs));
  }

  int players() const { return static_cast<int>(regs_.size()); }
  const Regularizer& factor(int i) const { return regs_.at(static_cast<std::size_t>(i)); }
  const ProductSet& space() const { return space_; }
  double strong_convexity() const { return k_; }

  double penalty(const Vector& x) const {
    return sum_blocks([&](const Regularizer& r, int i) { return r.penalty(space_.block(x, i)); });
  }
  double conjugate(const Vector& y) const {
    return sum_blocks([&](const Regularizer& r, int i) { return r.conjugate(space_.block(y, i)); });
  }
  double bregman(const Vector& p, const Vector& x) const {
    return sum_blocks([&](const Regularizer& r, int i) { return r.bregman(space_.block(p, i), space_.block(x, i)); });
  }
  double fenchel(const Vector& p, const Vector& y) const {
    return sum_blocks([&](const Regularizer& r, int i) { return r.fenchel(space_.block(p, i), space_.block(y, i)); });
  }
  double range() const {
    return sum_blocks([](const Regularizer& r, int) { return r.range(); });
  }

  // min over p in points of F(p, y).
  double fenchel_set(const std::vector<Vector>& points, const Vector& y) const {
    if (points.empty()) throw UsageError("fenchel_set: empty point set");
    double best = std::numeric_limits<double>::infinity();
    for (const Vector& p : points) best = std::min(best, fenchel(p, y));
    return best;
  }

  Vector choice(const Vector& y) const {
    check_dim(y);
    Vector x(space_.dim());
    for (int i = 0; i < players(); ++i) space_.block(x, i) = factor(i).choice(space_.block(y, i));
    return x;
  }

  Vector dual_witness(const Vector& x) const {
    check_dim(x);
    Vector y(space_.dim());
    for (int i = 0; i < players(); ++i) space_.block(y, i) = factor(i).dual_witness(space_.block(x, i));
    return y;
  }

  double primal_norm(const Vector& z) const {
    check_dim(z);
    return std::sqrt(sum_blocks([&](const Regularizer& r, int i) {
      const double n = r.primal_norm(space_.block(z, i));
      return n * n;
    }));
  }

  double dual_norm(const Vector& y) const {
    check_dim(y);
    return std::sqrt(sum_blocks([&](const Regularizer& r, int i) {
      const double n = r.dual_norm(space_.block(y, i));
      return n * n;
    }));
  }

  bool all_steep() const {
    return std::all_of(regs_.begin(), regs_.end(), [](const Regularizer& r) { return r.steep(); });
  }

 private:
  template <class F>
  double sum_blocks(F&& f) const {
    double s = 0.0;
    for (int i = 0; i < players(); ++i) s += f(factor(i), i);
    return s;
  }

  void check_dim(const Vector& v) const {
    if (v.size() != space_.dim()) throw UsageError("product regularizer: dimension mismatch");
  }

  std::vector<Regularizer> regs_;
  ProductSet space_;
  double k_ = 1.0;
};

}  // namespace gameda
