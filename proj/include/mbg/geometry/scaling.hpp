#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "mbg/errors.hpp"
#include "mbg/geometry/barrier.hpp"

namespace mbg::geometry {

// Symmetric positive definite A with A^2 = (H + c I)^{-1}, built from the
// symmetric eigendecomposition of H. Used as the sampling/scaling matrix
// A^t = (hess R(x^t) + c I)^{-1/2}.
class ScalingMatrix {
public:
  static constexpr double kEigenFloor = 1e-14;

  static ScalingMatrix from_hessian(const Mat& hess, double c) {
    if (c < 0) throw ParamError("scaling matrix: regularization must be >= 0");
    Eigen::SelfAdjointEigenSolver<Mat> eig(hess);
    if (eig.info() != Eigen::Success)
      throw SingularityError("scaling matrix: eigendecomposition failed");
    Vec lam = eig.eigenvalues().array() + c;
    if (lam.minCoeff() < kEigenFloor)
      throw SingularityError("scaling matrix: eigenvalue below 1e-14 floor");
    const Mat& q = eig.eigenvectors();
    ScalingMatrix s;
    s.reg_ = c;
    s.a_ = q * lam.array().rsqrt().matrix().asDiagonal() * q.transpose();
    s.a_inv_ = q * lam.array().sqrt().matrix().asDiagonal() * q.transpose();
    s.sigma_max_ = 1.0 / std::sqrt(lam.minCoeff());
    return s;
  }

  // A for the Zero barrier short-circuits to I/sqrt(c).
  static ScalingMatrix isotropic(int dim, double c) {
    if (c < kEigenFloor)
      throw SingularityError("scaling matrix: zero barrier needs c > 0");
    ScalingMatrix s;
    s.reg_ = c;
    s.a_ = Mat::Identity(dim, dim) / std::sqrt(c);
    s.a_inv_ = Mat::Identity(dim, dim) * std::sqrt(c);
    s.sigma_max_ = 1.0 / std::sqrt(c);
    return s;
  }

  const Mat& matrix() const { return a_; }
  const Mat& inverse() const { return a_inv_; }
  double regularization() const { return reg_; }
  double sigma_max() const { return sigma_max_; }
  int dim() const { return static_cast<int>(a_.rows()); }

  Vec apply(const Vec& v) const { return a_ * v; }
  Vec apply_inverse(const Vec& v) const { return a_inv_ * v; }

private:
  ScalingMatrix() = default;

  Mat a_, a_inv_;
  double reg_ = 0;
  double sigma_max_ = 0;
};

inline ScalingMatrix scaling_matrix(const Barrier& b, const Vec& x, double c) {
  if (b.kind() == BarrierKind::Zero)
    return ScalingMatrix::isotropic(b.dim(), c);
  return ScalingMatrix::from_hessian(b.hessian(x), c);
}

}  // namespace mbg::geometry
