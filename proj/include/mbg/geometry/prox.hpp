#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "mbg/errors.hpp"
#include "mbg/geometry/barrier.hpp"

namespace mbg::geometry {

// Mixed-Bregman prox subproblem
//   g(x') = eta <v, pivot - x'> + (quad_coef/2) ||pivot - x'||^2 + D_R(x', pivot)
// minimized over the barrier's feasible set. quad_coef carries the
// eta*beta*(t+1) factor (divided by the player weight in multi-agent use).
struct ProxProblem {
  Vec pivot;
  Vec direction;      // v-hat
  double eta = 0;
  double quad_coef = 0;
  const Barrier* barrier = nullptr;
};

inline double prox_objective(const ProxProblem& p, const Vec& x) {
  const double lin = p.eta * p.direction.dot(p.pivot - x);
  const double quad = 0.5 * p.quad_coef * (p.pivot - x).squaredNorm();
  return lin + quad + p.barrier->bregman(x, p.pivot);
}

inline Vec prox_gradient(const ProxProblem& p, const Vec& x) {
  return -p.eta * p.direction + p.quad_coef * (x - p.pivot) +
         p.barrier->gradient(x) - p.barrier->gradient(p.pivot);
}

inline Mat prox_hessian(const ProxProblem& p, const Vec& x) {
  Mat h = p.barrier->hessian(x);
  h.diagonal().array() += p.quad_coef;
  return h;
}

// Newton decrement lambda(x, g) = ||grad g(x)||_{x,*} measured in the dual
// local norm of hess g(x).
inline double newton_decrement(const ProxProblem& p, const Vec& x) {
  const Vec g = prox_gradient(p, x);
  const Mat h = prox_hessian(p, x);
  Eigen::LLT<Mat> llt(h);
  if (llt.info() != Eigen::Success)
    throw SingularityError("newton decrement: hessian is not positive definite");
  return std::sqrt(std::max(0.0, g.dot(llt.solve(g))));
}

// argmin of g over the feasible set, by damped Newton with a halving line
// search (Armijo constant 1e-4, domain check before acceptance). Stops at
// decrement <= 1e-10; after 100 iterations accepts decrement <= 1e-6 and
// otherwise reports failure. Zero barrier has the closed form
// pivot + eta*v/quad_coef.
inline Vec prox_step(const ProxProblem& p) {
  constexpr double kDecrementTol = 1e-10;
  constexpr double kAcceptTol = 1e-6;
  constexpr int kMaxIter = 100;

  if (p.barrier == nullptr) throw ParamError("prox_step: missing barrier");
  if (!(p.eta > 0)) throw ParamError("prox_step: eta must be > 0");
  if (p.quad_coef < 0) throw ParamError("prox_step: quad_coef must be >= 0");

  if (p.barrier->kind() == BarrierKind::Zero) {
    if (!(p.quad_coef > 0))
      throw SingularityError("prox_step: zero barrier needs quad_coef > 0");
    return p.pivot + (p.eta / p.quad_coef) * p.direction;
  }

  Vec x = p.pivot;
  double lambda = 0;
  for (int it = 0; it < kMaxIter; ++it) {
    const Vec g = prox_gradient(p, x);
    const Mat h = prox_hessian(p, x);
    Eigen::LLT<Mat> llt(h);
    if (llt.info() != Eigen::Success)
      throw SingularityError("prox_step: hessian is not positive definite");
    const Vec step = llt.solve(-g);
    lambda = std::sqrt(std::max(0.0, -g.dot(step)));
    if (lambda <= kDecrementTol) return x;

    const double slope = g.dot(step);  // = -lambda^2
    const double gx = prox_objective(p, x);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-16) {
      Vec cand = x + alpha * step;
      if (p.barrier->is_interior(cand) &&
          prox_objective(p, cand) <= gx + 1e-4 * alpha * slope) {
        x = std::move(cand);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // line search stalled at machine precision
  }
  if (lambda <= kAcceptTol) return x;
  throw ConvergenceError("prox_step: Newton decrement " + std::to_string(lambda) +
                         " after iteration budget");
}

}  // namespace mbg::geometry
