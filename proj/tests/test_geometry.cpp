#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mbg/geometry/barrier.hpp"
#include "mbg/geometry/prox.hpp"
#include "mbg/geometry/scaling.hpp"
#include "test_support.hpp"

using namespace mbg;
using namespace mbg::geometry;
using test_support::fd_gradient;
using test_support::fd_hessian;
using test_support::golden_section;
using test_support::random_direction;
using test_support::random_interior;
using sampling::RngStream;

namespace {

std::vector<Barrier> nonzero_test_barriers() {
  return {Barrier::box(1, 0.0, 1.0),
          Barrier::box((Eigen::VectorXd(3) << -1, 0, 2).finished(),
                       (Eigen::VectorXd(3) << 1, 2, 5).finished()),
          Barrier::budget_simplex(2, 1.0), Barrier::budget_simplex(4, 2.5),
          Barrier::ball(3, 1.0), Barrier::ball(2, 0.7)};
}

}  // namespace

TEST_CASE("box barrier closed forms at the center") {
  const Barrier b = Barrier::box(1, 0.0, 1.0);
  const Vec x = Vec::Constant(1, 0.5);
  CHECK(b.value(x) == Catch::Approx(-2.0 * std::log(0.5)).epsilon(1e-14));
  CHECK(b.gradient(x)[0] == Catch::Approx(0.0).margin(1e-14));
  CHECK(b.hessian(x)(0, 0) == Catch::Approx(8.0).epsilon(1e-14));
  CHECK(b.nu() == 2.0);
}

TEST_CASE("zero barrier is identically zero") {
  const Barrier b = Barrier::zero(3);
  const Vec x = (Vec(3) << 4.0, -7.0, 0.1).finished();
  CHECK(b.value(x) == 0.0);
  CHECK(b.gradient(x).norm() == 0.0);
  CHECK(b.hessian(x).norm() == 0.0);
  CHECK(b.nu() == 0.0);
  CHECK(b.is_interior(x));
}

TEST_CASE("budget simplex gradient by hand differentiation") {
  // -sum log(x_s) - log(B - sum x): at (0.25, 0.25) with B = 1 each component
  // is -1/0.25 + 1/0.5 = -2.
  const Barrier b = Barrier::budget_simplex(2, 1.0);
  const Vec x = Vec::Constant(2, 0.25);
  const Vec g = b.gradient(x);
  CHECK(g[0] == Catch::Approx(-2.0).epsilon(1e-14));
  CHECK(g[1] == Catch::Approx(-2.0).epsilon(1e-14));
  CHECK(b.nu() == 3.0);
}

TEST_CASE("boundary points are rejected") {
  const Barrier box = Barrier::box(1, 0.0, 1.0);
  CHECK_THROWS_AS(box.value(Vec::Zero(1)), BoundaryError);
  CHECK_THROWS_AS(box.gradient(Vec::Constant(1, 1.0)), BoundaryError);
  CHECK_THROWS_AS(box.hessian(Vec::Constant(1, 2.0)), BoundaryError);
  const Barrier simplex = Barrier::budget_simplex(2, 1.0);
  CHECK_THROWS_AS(simplex.value(Vec::Constant(2, 0.5)), BoundaryError);
}

TEST_CASE("gradients and hessians match central finite differences") {
  RngStream rng(11);
  for (const Barrier& b : nonzero_test_barriers()) {
    auto value = [&](const Vec& x) { return b.value(x); };
    auto grad = [&](const Vec& x) { return b.gradient(x); };
    for (int rep = 0; rep < 100; ++rep) {
      const Vec x = random_interior(b, rng);
      const double h = 3e-6;
      const Vec g = b.gradient(x);
      const Vec g_fd = fd_gradient(value, x, h);
      REQUIRE((g - g_fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
      const Mat hess = b.hessian(x);
      const Mat hess_fd = fd_hessian(grad, x, h);
      REQUIRE((hess - hess_fd).norm() <= 1e-6 * std::max(1.0, hess.norm()));
    }
  }
}

TEST_CASE("hessians are symmetric positive definite at interior points") {
  RngStream rng(12);
  for (const Barrier& b : nonzero_test_barriers()) {
    for (int rep = 0; rep < 20; ++rep) {
      const Vec x = random_interior(b, rng);
      const Mat h = b.hessian(x);
      REQUIRE((h - h.transpose()).norm() <= 1e-12 * std::max(1.0, h.norm()));
      Eigen::SelfAdjointEigenSolver<Mat> eig(h);
      REQUIRE(eig.eigenvalues().minCoeff() > 0);
    }
  }
}

TEST_CASE("self-concordance inequality via third-order differences") {
  // |d^3/ds^3 R(x + s h)| <= 2 (h' hess R(x) h)^{3/2} along random directions.
  RngStream rng(13);
  for (const Barrier& b : nonzero_test_barriers()) {
    for (int rep = 0; rep < 25; ++rep) {
      const Vec x = random_interior(b, rng, 0.2);
      const Vec h = random_direction(b.dim(), rng);
      auto phi = [&](double s) { return b.value(x + s * h); };
      const double d = 1e-3;
      const double third =
          (phi(2 * d) - 2 * phi(d) + 2 * phi(-d) - phi(-2 * d)) / (2 * d * d * d);
      const double local = h.dot(b.hessian(x) * h);
      REQUIRE(std::abs(third) <= 2.0 * std::pow(local, 1.5) * (1.0 + 1e-2) + 1e-6);
    }
  }
}

TEST_CASE("scaling matrix closed form for the zero barrier") {
  // 1-d zero barrier with c = (t+1)/(ell + 2 sqrt(n t)) inverts to
  // A = sqrt(ell + 2 sqrt(n t)) / sqrt(t+1).
  const double ell = 15.0, n = 60.0, t = 37.0;
  const double c = (t + 1.0) / (ell + 2.0 * std::sqrt(n * t));
  const Barrier b = Barrier::zero(1);
  const ScalingMatrix a = scaling_matrix(b, Vec::Zero(1), c);
  const double expected = std::sqrt(ell + 2.0 * std::sqrt(n * t)) / std::sqrt(t + 1.0);
  CHECK(a.matrix()(0, 0) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("scaling matrix of the identity hessian") {
  const Mat h = Mat::Identity(3, 3);
  const ScalingMatrix a = ScalingMatrix::from_hessian(h, 0.0);
  CHECK((a.matrix() - Mat::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("scaling matrix multiplies back against a random SPD hessian") {
  RngStream rng(14);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat m(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = gauss(rng);
  const Mat h = m * m.transpose() + 0.1 * Mat::Identity(3, 3);
  const double c = 0.7;
  const ScalingMatrix a = ScalingMatrix::from_hessian(h, c);
  const Mat shifted = h + c * Mat::Identity(3, 3);
  REQUIRE((a.matrix() * a.matrix() * shifted - Mat::Identity(3, 3)).norm() <= 1e-9);
  REQUIRE((a.matrix() - a.matrix().transpose()).norm() <= 1e-12);
  REQUIRE((a.matrix() * a.inverse() - Mat::Identity(3, 3)).norm() <= 1e-12);
  // A^2 = (H + cI)^{-1} to relative 1e-10 in spectral norm.
  const Mat lhs = a.matrix() * a.matrix();
  const Mat rhs = shifted.inverse();
  REQUIRE((lhs - rhs).operatorNorm() <= 1e-10 * rhs.operatorNorm());
}

TEST_CASE("scaling matrix rejects singular input") {
  CHECK_THROWS_AS(ScalingMatrix::from_hessian(Mat::Zero(2, 2), 0.0),
                  SingularityError);
  CHECK_THROWS_AS(scaling_matrix(Barrier::zero(2), Vec::Zero(2), 0.0),
                  SingularityError);
}

TEST_CASE("minkowski gauge on the box") {
  const Barrier b = Barrier::box(1, 0.0, 1.0);
  const Vec anchor = Vec::Constant(1, 0.5);
  CHECK(b.gauge(anchor, Vec::Constant(1, 1.0)) == Catch::Approx(1.0).epsilon(1e-12));
  CHECK(b.gauge(anchor, anchor) == 0.0);
  CHECK(b.gauge(anchor, Vec::Constant(1, 0.75)) ==
        Catch::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(b.gauge(anchor, Vec::Constant(1, 1.5)), DomainError);
}

TEST_CASE("minkowski gauge hits one on every boundary") {
  RngStream rng(15);
  for (const Barrier& b : nonzero_test_barriers()) {
    const Vec anchor = b.analytic_center();
    for (int rep = 0; rep < 50; ++rep) {
      const Vec y = random_interior(b, rng, 0.01);
      const double g = b.gauge(anchor, y);
      REQUIRE(g >= 0.0);
      REQUIRE(g < 1.0);
      if (g < 1e-8) continue;
      // Push to the boundary along the same ray: gauge becomes 1.
      const Vec boundary = anchor + (y - anchor) / g;
      REQUIRE(b.gauge(anchor, boundary) == Catch::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("barrier range bound formula") {
  CHECK(Barrier::box(1, 0.0, 1.0).range_bound(1.0) ==
        Catch::Approx(2.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(Barrier::ball(5, 1.0).range_bound(0.1) ==
        Catch::Approx(std::log(11.0)).epsilon(1e-12));
}

TEST_CASE("barrier flatness bound holds on sampled shrunken box") {
  // 100 points with gauge <= 1/(1+0.1): R(x) - R(center) <= 2 log 11.
  const Barrier b = Barrier::box(1, 0.0, 1.0);
  const Vec center = b.analytic_center();
  const double r_center = b.value(center);
  const double bound = b.range_bound(0.1);
  RngStream rng(16);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double max_gap = 0;
  for (int rep = 0; rep < 100; ++rep) {
    // Sample on the ray through a random direction with gauge <= 1/1.1.
    const double gauge_target = u01(rng) / 1.1;
    const double dir = u01(rng) < 0.5 ? -1.0 : 1.0;
    const Vec y = center + Vec::Constant(1, dir * gauge_target * 0.5);
    REQUIRE(b.gauge(center, y) <= 1.0 / 1.1 + 1e-12);
    max_gap = std::max(max_gap, b.value(y) - r_center);
  }
  REQUIRE(max_gap <= bound);
}

TEST_CASE("newton decrement closed forms") {
  const Barrier zero = Barrier::zero(2);
  ProxProblem p;
  p.pivot = Vec::Zero(2);
  p.direction = (Vec(2) << 1.0, -2.0).finished();
  p.eta = 0.3;
  p.quad_coef = 2.0;
  p.barrier = &zero;

  SECTION("vanishes at the unconstrained minimizer") {
    const Vec x_min = p.pivot + (p.eta / p.quad_coef) * p.direction;
    CHECK(newton_decrement(p, x_min) <= 1e-12);
  }

  SECTION("equals eta * ||A v|| at the pivot") {
    const Barrier box = Barrier::box(2, 0.0, 1.0);
    ProxProblem q = p;
    q.pivot = Vec::Constant(2, 0.4);
    q.barrier = &box;
    q.quad_coef = 0.8;
    const ScalingMatrix a = scaling_matrix(box, q.pivot, q.quad_coef);
    const double expected = q.eta * a.apply(q.direction).norm();
    CHECK(newton_decrement(q, q.pivot) == Catch::Approx(expected).epsilon(1e-12));
  }

  SECTION("agrees with the dense formula on a random 2-d instance") {
    const Barrier simplex = Barrier::budget_simplex(2, 1.0);
    ProxProblem q;
    q.pivot = (Vec(2) << 0.3, 0.25).finished();
    q.direction = (Vec(2) << -1.5, 0.7).finished();
    q.eta = 0.11;
    q.quad_coef = 0.6;
    q.barrier = &simplex;
    const Vec x = (Vec(2) << 0.2, 0.35).finished();
    const Vec g = -q.eta * q.direction + q.quad_coef * (x - q.pivot) +
                  simplex.gradient(x) - simplex.gradient(q.pivot);
    const Mat h = simplex.hessian(x) + q.quad_coef * Mat::Identity(2, 2);
    const double expected = std::sqrt(g.dot(h.inverse() * g));
    CHECK(newton_decrement(q, x) == Catch::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("prox step closed form for the zero barrier") {
  const Barrier zero = Barrier::zero(2);
  ProxProblem p;
  p.pivot = (Vec(2) << 0.5, -1.0).finished();
  p.direction = (Vec(2) << 3.0, 1.0).finished();
  p.eta = 0.05;
  const double beta_t = 4.0;  // beta*(t+1)
  p.quad_coef = p.eta * beta_t;
  p.barrier = &zero;
  const Vec out = prox_step(p);
  // Stationarity -eta v + eta beta (t+1) (x' - x) = 0 gives x + v/(beta(t+1)).
  const Vec expected = p.pivot + p.direction / beta_t;
  CHECK((out - expected).norm() <= 1e-14);
}

TEST_CASE("prox step keeps the pivot when the direction vanishes") {
  for (const Barrier& b : nonzero_test_barriers()) {
    ProxProblem p;
    p.pivot = b.analytic_center();
    if (b.kind() == BarrierKind::Ball)
      p.pivot = Vec::Constant(b.dim(), 0.1);  // off-center pivot
    p.direction = Vec::Zero(b.dim());
    p.eta = 0.2;
    p.quad_coef = 0.5;
    p.barrier = &b;
    const Vec out = prox_step(p);
    REQUIRE((out - p.pivot).norm() <= 1e-9);
  }
}

TEST_CASE("prox step against a golden-section oracle on the box") {
  const Barrier box = Barrier::box(1, 0.0, 1.0);
  ProxProblem p;
  p.pivot = Vec::Constant(1, 0.5);
  p.direction = Vec::Constant(1, 100.0);
  p.eta = 0.1;
  p.quad_coef = 0.1;  // eta * beta(t+1) with beta(t+1) = 1
  p.barrier = &box;
  const Vec out = prox_step(p);
  REQUIRE(out[0] > 0.5);
  REQUIRE(out[0] < 1.0);
  const double oracle = golden_section(
      [&](double x) { return prox_objective(p, Vec::Constant(1, x)); }, 1e-12,
      1.0 - 1e-12);
  REQUIRE(out[0] == Catch::Approx(oracle).margin(1e-6));
}

TEST_CASE("prox step decreases the objective and satisfies first-order optimality") {
  RngStream rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (const Barrier& b : nonzero_test_barriers()) {
    for (int rep = 0; rep < 25; ++rep) {
      ProxProblem p;
      p.pivot = random_interior(b, rng);
      p.direction = 5.0 * random_direction(b.dim(), rng) * std::abs(gauss(rng));
      p.eta = 0.05 + 0.2 * std::abs(gauss(rng));
      p.quad_coef = 0.1 + std::abs(gauss(rng));
      p.barrier = &b;
      const Vec out = prox_step(p);
      REQUIRE(b.is_interior(out));
      REQUIRE(prox_objective(p, out) <= prox_objective(p, p.pivot) + 1e-12);
      REQUIRE(newton_decrement(p, out) <= 1e-8);
    }
  }
}

TEST_CASE("proximity bound: step length at most twice the decrement") {
  // Whenever lambda(pivot, g) <= 1/2, ||pivot - prox||_pivot <= 2 lambda
  // in the local norm of hess g(pivot).
  RngStream rng(18);
  std::normal_distribution<double> gauss(0.0, 1.0);
  int checked = 0;
  for (const Barrier& b : nonzero_test_barriers()) {
    for (int rep = 0; rep < 60; ++rep) {
      ProxProblem p;
      p.pivot = random_interior(b, rng);
      p.direction = random_direction(b.dim(), rng) * std::abs(gauss(rng));
      p.eta = 0.02 + 0.1 * std::abs(gauss(rng));
      p.quad_coef = 0.2 + std::abs(gauss(rng));
      p.barrier = &b;
      const double lambda = newton_decrement(p, p.pivot);
      if (lambda > 0.5) continue;
      const Vec out = prox_step(p);
      const Vec step = out - p.pivot;
      const Mat h = prox_hessian(p, p.pivot);
      const double step_norm = std::sqrt(step.dot(h * step));
      REQUIRE(step_norm <= 2.0 * lambda + 1e-10);
      ++checked;
    }
  }
  REQUIRE(checked > 100);
}

TEST_CASE("analytic centers") {
  CHECK(Barrier::box(1, 0.0, 1.0).analytic_center()[0] ==
        Catch::Approx(0.5).margin(1e-12));
  const Vec simplex_center = Barrier::budget_simplex(2, 1.0).analytic_center();
  CHECK(simplex_center[0] == Catch::Approx(1.0 / 3.0).margin(1e-10));
  CHECK(simplex_center[1] == Catch::Approx(1.0 / 3.0).margin(1e-10));
  CHECK(Barrier::ball(3, 1.0).analytic_center().norm() <= 1e-12);
  for (const Barrier& b : nonzero_test_barriers())
    REQUIRE(b.gradient(b.analytic_center()).norm() <= 1e-10);
  // Zero barrier returns its configured origin.
  const Vec origin = (Vec(2) << 0.3, -0.4).finished();
  CHECK((Barrier::zero(2, origin).analytic_center() - origin).norm() == 0.0);
}

TEST_CASE("dikin membership") {
  const Barrier b = Barrier::box(1, 0.0, 1.0);
  const Vec x = Vec::Constant(1, 0.5);
  CHECK(b.dikin_contains(x, x));
  // ||0.9 - 0.5||_x = 0.4 sqrt(8) ~ 1.131 > 1.
  CHECK_FALSE(b.dikin_contains(x, Vec::Constant(1, 0.9)));
}

TEST_CASE("dikin ellipsoid is contained in the feasible set") {
  RngStream rng(19);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (const Barrier& b : nonzero_test_barriers()) {
    for (int rep = 0; rep < 10000; ++rep) {
      const Vec x = random_interior(b, rng, 0.01);
      const Mat h = b.hessian(x);
      Eigen::SelfAdjointEigenSolver<Mat> eig(h);
      // Unit-local-norm direction: y = x + H^{-1/2} u with ||u|| <= 1.
      const Vec u = random_direction(b.dim(), rng) * std::pow(u01(rng), 0.25);
      const Vec y = x + eig.operatorInverseSqrt() * u;
      REQUIRE(b.local_norm(x, y - x) <= 1.0 + 1e-9);
      REQUIRE(b.is_feasible(y, 1e-9));
    }
  }
}

TEST_CASE("hessian stability inside the dikin ellipsoid") {
  // For x' in W(x) with r = ||x'-x||_x < 1:
  //   (1-r)^2 hess R(x) <= hess R(x') <= (1-r)^{-2} hess R(x).
  RngStream rng(20);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (const Barrier& b : nonzero_test_barriers()) {
    for (int rep = 0; rep < 200; ++rep) {
      const Vec x = random_interior(b, rng, 0.02);
      const Mat h = b.hessian(x);
      Eigen::SelfAdjointEigenSolver<Mat> eig(h);
      const double r = 0.95 * u01(rng);
      const Vec y = x + eig.operatorInverseSqrt() *
                            (r * random_direction(b.dim(), rng));
      const double r_actual = b.local_norm(x, y - x);
      REQUIRE(r_actual < 1.0);
      const Mat whitened = eig.operatorInverseSqrt() * b.hessian(y) *
                           eig.operatorInverseSqrt();
      Eigen::SelfAdjointEigenSolver<Mat> weig(whitened);
      const double lo = (1.0 - r_actual) * (1.0 - r_actual);
      const double hi = 1.0 / lo;
      REQUIRE(weig.eigenvalues().minCoeff() >= lo - 1e-8);
      REQUIRE(weig.eigenvalues().maxCoeff() <= hi + 1e-8 * hi);
    }
  }
}

TEST_CASE("prox step reports convergence failure honestly") {
  // Zero barrier with quad_coef = 0 has no minimizer.
  const Barrier zero = Barrier::zero(1);
  ProxProblem p;
  p.pivot = Vec::Zero(1);
  p.direction = Vec::Constant(1, 1.0);
  p.eta = 0.1;
  p.quad_coef = 0.0;
  p.barrier = &zero;
  CHECK_THROWS_AS(prox_step(p), SingularityError);
}
