#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "mbg/errors.hpp"

namespace mbg::geometry {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class BarrierKind { Box, BudgetSimplex, Ball, Zero };

// Self-concordant barrier over one of the four feasible-set kinds used by the
// experiments:
//   Box            [lo_k, hi_k] per coordinate,  R = -sum log(x-lo) - sum log(hi-x)
//   BudgetSimplex  {x >= 0, sum x <= B},         R = -sum log(x_s) - log(B - sum x_s)
//   Ball           {||x|| <= r},                 R = -log(r^2 - ||x||^2)
//   Zero           all of R^n,                   R = 0
// Immutable after construction; all queries are const and thread-safe.
class Barrier {
public:
  static Barrier box(Vec lower, Vec upper) {
    if (lower.size() != upper.size() || lower.size() == 0)
      throw ParamError("box barrier: bound vectors must match and be nonempty");
    for (int k = 0; k < lower.size(); ++k)
      if (!(lower[k] < upper[k]))
        throw ParamError("box barrier: need lower < upper per coordinate");
    Barrier b;
    b.kind_ = BarrierKind::Box;
    b.dim_ = static_cast<int>(lower.size());
    b.lower_ = std::move(lower);
    b.upper_ = std::move(upper);
    b.nu_ = 2.0 * b.dim_;
    return b;
  }

  static Barrier box(int dim, double lo, double hi) {
    return box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
  }

  static Barrier budget_simplex(int dim, double budget) {
    if (dim < 1) throw ParamError("budget simplex: dimension must be >= 1");
    if (!(budget > 0)) throw ParamError("budget simplex: budget must be > 0");
    Barrier b;
    b.kind_ = BarrierKind::BudgetSimplex;
    b.dim_ = dim;
    b.budget_ = budget;
    b.nu_ = dim + 1.0;
    return b;
  }

  static Barrier ball(int dim, double radius) {
    if (dim < 1) throw ParamError("ball barrier: dimension must be >= 1");
    if (!(radius > 0)) throw ParamError("ball barrier: radius must be > 0");
    Barrier b;
    b.kind_ = BarrierKind::Ball;
    b.dim_ = dim;
    b.radius_ = radius;
    b.nu_ = 1.0;
    return b;
  }

  static Barrier zero(int dim, Vec origin = Vec()) {
    if (dim < 1) throw ParamError("zero barrier: dimension must be >= 1");
    Barrier b;
    b.kind_ = BarrierKind::Zero;
    b.dim_ = dim;
    b.origin_ = origin.size() == 0 ? Vec::Zero(dim) : std::move(origin);
    if (b.origin_.size() != dim)
      throw ParamError("zero barrier: origin dimension mismatch");
    b.nu_ = 0.0;
    return b;
  }

  BarrierKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double nu() const { return nu_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  double budget() const { return budget_; }
  double radius() const { return radius_; }

  // Strict interior membership (Zero barrier: everywhere).
  bool is_interior(const Vec& x) const {
    check_dim(x);
    switch (kind_) {
      case BarrierKind::Box:
        return ((x - lower_).array() > 0).all() &&
               ((upper_ - x).array() > 0).all();
      case BarrierKind::BudgetSimplex:
        return (x.array() > 0).all() && x.sum() < budget_;
      case BarrierKind::Ball:
        return x.squaredNorm() < radius_ * radius_;
      case BarrierKind::Zero:
        return true;
    }
    return false;
  }

  // Closed-set membership with absolute tolerance on each constraint.
  bool is_feasible(const Vec& x, double tol = 0.0) const {
    check_dim(x);
    switch (kind_) {
      case BarrierKind::Box:
        return ((x - lower_).array() >= -tol).all() &&
               ((upper_ - x).array() >= -tol).all();
      case BarrierKind::BudgetSimplex:
        return (x.array() >= -tol).all() && x.sum() <= budget_ + tol;
      case BarrierKind::Ball:
        return x.norm() <= radius_ + tol;
      case BarrierKind::Zero:
        return true;
    }
    return false;
  }

  double value(const Vec& x) const {
    require_interior(x);
    switch (kind_) {
      case BarrierKind::Box:
        return -(x - lower_).array().log().sum() -
               (upper_ - x).array().log().sum();
      case BarrierKind::BudgetSimplex:
        return -x.array().log().sum() - std::log(budget_ - x.sum());
      case BarrierKind::Ball:
        return -std::log(radius_ * radius_ - x.squaredNorm());
      case BarrierKind::Zero:
        return 0.0;
    }
    return 0.0;
  }

  Vec gradient(const Vec& x) const {
    require_interior(x);
    switch (kind_) {
      case BarrierKind::Box:
        return (-(x - lower_).array().inverse() +
                (upper_ - x).array().inverse())
            .matrix();
      case BarrierKind::BudgetSimplex: {
        const double inv_slack = 1.0 / (budget_ - x.sum());
        return (-x.array().inverse() + inv_slack).matrix();
      }
      case BarrierKind::Ball: {
        const double s = radius_ * radius_ - x.squaredNorm();
        return (2.0 / s) * x;
      }
      case BarrierKind::Zero:
        return Vec::Zero(dim_);
    }
    return Vec();
  }

  Mat hessian(const Vec& x) const {
    require_interior(x);
    switch (kind_) {
      case BarrierKind::Box: {
        Vec d = (x - lower_).array().square().inverse().matrix() +
                (upper_ - x).array().square().inverse().matrix();
        return d.asDiagonal();
      }
      case BarrierKind::BudgetSimplex: {
        const double inv_slack2 = 1.0 / square(budget_ - x.sum());
        Mat h = Mat::Constant(dim_, dim_, inv_slack2);
        h.diagonal() += x.array().square().inverse().matrix();
        return h;
      }
      case BarrierKind::Ball: {
        const double s = radius_ * radius_ - x.squaredNorm();
        Mat h = (4.0 / (s * s)) * (x * x.transpose());
        h.diagonal().array() += 2.0 / s;
        return h;
      }
      case BarrierKind::Zero:
        return Mat::Zero(dim_, dim_);
    }
    return Mat();
  }

  // Local norm ||h||_x = sqrt(h' H(x) h).
  double local_norm(const Vec& x, const Vec& h) const {
    switch (kind_) {
      case BarrierKind::Box: {
        require_interior(x);
        double acc = 0;
        for (int k = 0; k < dim_; ++k)
          acc += h[k] * h[k] *
                 (1.0 / square(x[k] - lower_[k]) + 1.0 / square(upper_[k] - x[k]));
        return std::sqrt(acc);
      }
      default: {
        const Mat h_mat = hessian(x);
        return std::sqrt(std::max(0.0, h.dot(h_mat * h)));
      }
    }
  }

  // True iff y lies in the Dikin ellipsoid W(x) = {||y - x||_x <= 1}.
  bool dikin_contains(const Vec& x, const Vec& y) const {
    return local_norm(x, y - x) <= 1.0;
  }

  // Minkowski gauge of y with respect to an interior anchor:
  //   pi_anchor(y) = inf{ t >= 0 : anchor + (y - anchor)/t in X }.
  // 0 at the anchor, 1 on the boundary, computed from the ray-to-boundary
  // ratio in closed form per kind.
  double gauge(const Vec& anchor, const Vec& y) const {
    check_dim(anchor);
    check_dim(y);
    if (!is_interior(anchor))
      throw DomainError("gauge: anchor must be strictly interior");
    if (!is_feasible(y, 1e-12))
      throw DomainError("gauge: query point is infeasible");
    if (kind_ == BarrierKind::Zero) return 0.0;
    const Vec d = y - anchor;
    if (d.norm() == 0.0) return 0.0;
    double g = 0.0;
    switch (kind_) {
      case BarrierKind::Box:
        for (int k = 0; k < dim_; ++k) {
          if (d[k] > 0) g = std::max(g, d[k] / (upper_[k] - anchor[k]));
          else if (d[k] < 0) g = std::max(g, -d[k] / (anchor[k] - lower_[k]));
        }
        break;
      case BarrierKind::BudgetSimplex: {
        for (int k = 0; k < dim_; ++k)
          if (d[k] < 0) g = std::max(g, -d[k] / anchor[k]);
        const double ds = d.sum();
        if (ds > 0) g = std::max(g, ds / (budget_ - anchor.sum()));
        break;
      }
      case BarrierKind::Ball: {
        const double a = d.squaredNorm();
        const double b = anchor.dot(d);
        const double c = anchor.squaredNorm() - radius_ * radius_;
        const double t_max = (-b + std::sqrt(b * b - a * c)) / a;
        g = 1.0 / t_max;
        break;
      }
      case BarrierKind::Zero:
        break;
    }
    return g;
  }

  // Upper bound on R(x) - R(center) over {gauge <= 1/(1+eps)}: nu*log(1+1/eps).
  double range_bound(double eps) const {
    if (!(eps > 0 && eps <= 1)) throw ParamError("range_bound: eps in (0,1]");
    return nu_ * std::log1p(1.0 / eps);
  }

  // Bregman divergence D_R(p, x) = R(p) - R(x) - <grad R(x), p - x>.
  double bregman(const Vec& p, const Vec& x) const {
    if (kind_ == BarrierKind::Zero) return 0.0;
    return value(p) - value(x) - gradient(x).dot(p - x);
  }

  // Natural strictly interior starting point per kind.
  Vec canonical_interior() const {
    switch (kind_) {
      case BarrierKind::Box:
        return 0.5 * (lower_ + upper_);
      case BarrierKind::BudgetSimplex:
        return Vec::Constant(dim_, budget_ / (dim_ + 1.0));
      case BarrierKind::Ball:
        return Vec::Zero(dim_);
      case BarrierKind::Zero:
        return origin_;
    }
    return Vec();
  }

  // argmin R, found by damped Newton from the canonical interior point until
  // ||grad R|| <= 1e-10. The Zero barrier returns its configured origin.
  Vec analytic_center() const {
    if (kind_ == BarrierKind::Zero) return origin_;
    Vec x = canonical_interior();
    constexpr double kGradTol = 1e-10;
    for (int it = 0; it < 100; ++it) {
      const Vec g = gradient(x);
      if (g.norm() <= kGradTol) return x;
      const Mat h = hessian(x);
      const Vec step = h.llt().solve(-g);
      double alpha = 1.0;
      const double v0 = value(x);
      while (alpha > 1e-16) {
        Vec cand = x + alpha * step;
        if (is_interior(cand) && value(cand) <= v0 + 1e-4 * alpha * g.dot(step))
          break;
        alpha *= 0.5;
      }
      x += alpha * step;
    }
    if (gradient(x).norm() <= 1e-6) return x;
    throw ConvergenceError("analytic_center: damped Newton did not converge");
  }

  std::string kind_name() const {
    switch (kind_) {
      case BarrierKind::Box: return "box";
      case BarrierKind::BudgetSimplex: return "budget-simplex";
      case BarrierKind::Ball: return "ball";
      case BarrierKind::Zero: return "zero";
    }
    return "?";
  }

private:
  Barrier() = default;

  static double square(double v) { return v * v; }

  void check_dim(const Vec& x) const {
    if (x.size() != dim_)
      throw ParamError("barrier: dimension mismatch (" +
                       std::to_string(x.size()) + " vs " +
                       std::to_string(dim_) + ")");
  }

  void require_interior(const Vec& x) const {
    if (kind_ == BarrierKind::Zero) {
      check_dim(x);
      return;
    }
    if (!is_interior(x))
      throw BoundaryError("barrier(" + kind_name() +
                          "): point on or outside the boundary");
  }

  BarrierKind kind_ = BarrierKind::Zero;
  int dim_ = 0;
  double nu_ = 0;
  Vec lower_, upper_;   // Box
  double budget_ = 0;   // BudgetSimplex
  double radius_ = 0;   // Ball
  Vec origin_;          // Zero
};

}  // namespace mbg::geometry
