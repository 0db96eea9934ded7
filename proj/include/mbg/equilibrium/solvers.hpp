#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>

#include "mbg/equilibrium/projection.hpp"
#include "mbg/games/families.hpp"
#include "mbg/sampling/rng.hpp"

namespace mbg::equilibrium {

using games::Game;
using geometry::Mat;
using geometry::Vec;

// Reference Nash equilibrium with the residual it was certified at.
struct NeSolution {
  Vec x_star;
  double residual = 0;
  std::string solver;
  long iterations = 0;
};

// Joint projection onto the product of per-player sets.
inline Vec project_profile(const Game& game, const Vec& y) {
  Vec out(game.total_dim);
  for (int i = 0; i < game.num_players; ++i)
    out.segment(game.offsets[i], game.dims[i]) =
        project(game.domains[i], y.segment(game.offsets[i], game.dims[i]));
  return out;
}

// Natural residual ||x - Pi_X(x + v(x))|| of the equilibrium variational
// inequality; zero exactly at a Nash equilibrium.
inline double natural_residual(const Game& game, const Vec& x) {
  return (x - project_profile(game, x + game.gradients(x))).norm();
}

// Cournot: the potential
//   (b/2)(sum x)^2 + (b/2) sum x^2 + sum c_j x_j - a sum x
// is b-strongly convex with Hessian b(I + 11'); projected gradient descent
// with step 1/(b(N+1)) converges linearly. Stops at gradient-mapping norm
// <= 1e-10.
inline NeSolution solve_ne_cournot(const games::CournotParams& p) {
  const Game game = games::cournot_build(p);
  const int n = p.num_players;
  const double lip = p.b * (n + 1);
  const double step = 1.0 / lip;

  Vec x = 0.5 * p.capacities;
  NeSolution sol;
  sol.solver = "cournot-projected-gradient";
  constexpr long kMaxIter = 2000000;
  for (long it = 1; it <= kMaxIter; ++it) {
    const Vec v = game.gradients(x);  // = -grad potential
    const Vec next = project_box(Vec::Zero(n), p.capacities, x + step * v);
    const double mapping_norm = (x - next).norm() / step;
    x = next;
    if (mapping_norm <= 1e-10) {
      sol.iterations = it;
      sol.x_star = x;
      sol.residual = natural_residual(game, x);
      return sol;
    }
  }
  throw ConvergenceError("solve_ne_cournot: no convergence in iteration budget");
}

namespace detail {

inline Vec random_feasible_profile(const Game& game, sampling::RngStream& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Vec x(game.total_dim);
  for (int i = 0; i < game.num_players; ++i) {
    const auto& dom = game.domains[i];
    Vec xi(game.dims[i]);
    switch (dom.kind()) {
      case geometry::BarrierKind::Box:
        for (int k = 0; k < game.dims[i]; ++k)
          xi[k] = dom.lower()[k] + u01(rng) * (dom.upper()[k] - dom.lower()[k]);
        break;
      case geometry::BarrierKind::BudgetSimplex: {
        for (int k = 0; k < game.dims[i]; ++k) xi[k] = u01(rng);
        const double target = u01(rng) * dom.budget();
        xi *= target / std::max(xi.sum(), 1e-12);
        break;
      }
      case geometry::BarrierKind::Ball: {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int k = 0; k < game.dims[i]; ++k) xi[k] = gauss(rng);
        xi *= dom.radius() * std::pow(u01(rng), 1.0 / game.dims[i]) /
              std::max(xi.norm(), 1e-12);
        break;
      }
      case geometry::BarrierKind::Zero:
        for (int k = 0; k < game.dims[i]; ++k) xi[k] = 2.0 * u01(rng) - 1.0;
        break;
    }
    x.segment(game.offsets[i], game.dims[i]) = xi;
  }
  return x;
}

// Lipschitz constant of the weighted operator estimated from sampled
// difference quotients, inflated by a 1.5 safety factor.
inline double sampled_operator_lipschitz(const Game& game,
                                         sampling::RngStream& rng) {
  auto weighted = [&](const Vec& x) {
    Vec v = game.gradients(x);
    for (int i = 0; i < game.num_players; ++i)
      v.segment(game.offsets[i], game.dims[i]) *= game.lambdas[i];
    return v;
  };
  double lip = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Vec x = random_feasible_profile(game, rng);
    const Vec y = random_feasible_profile(game, rng);
    const double dist = (x - y).norm();
    if (dist < 1e-12) continue;
    lip = std::max(lip, (weighted(x) - weighted(y)).norm() / dist);
  }
  return 1.5 * std::max(lip, 1e-12);
}

}  // namespace detail

// Extragradient on the weighted operator (lambda_i v_i)_i with Euclidean
// projections, run to natural residual <= tol. The step halves when the
// residual stops improving for a long stretch.
inline NeSolution solve_ne_vi(const Game& game, double tol = 1e-10,
                              const Vec* start = nullptr) {
  sampling::RngStream rng(0x76692d6e, 0, 0);
  const double lip = detail::sampled_operator_lipschitz(game, rng);
  double step = 1.0 / (2.0 * lip);

  auto weighted = [&](const Vec& x) {
    Vec v = game.gradients(x);
    for (int i = 0; i < game.num_players; ++i)
      v.segment(game.offsets[i], game.dims[i]) *= game.lambdas[i];
    return v;
  };

  Vec x(game.total_dim);
  if (start != nullptr) {
    x = *start;
  } else {
    for (int i = 0; i < game.num_players; ++i)
      x.segment(game.offsets[i], game.dims[i]) =
          game.domains[i].analytic_center();
  }

  NeSolution sol;
  sol.solver = "vi-extragradient";
  constexpr long kMaxIter = 5000000;
  double best_residual = std::numeric_limits<double>::infinity();
  long stall = 0;
  for (long it = 1; it <= kMaxIter; ++it) {
    const Vec mid = project_profile(game, x + step * weighted(x));
    x = project_profile(game, x + step * weighted(mid));
    if (it % 16 == 0 || it == 1) {
      const double res = natural_residual(game, x);
      if (res <= tol) {
        sol.iterations = it;
        sol.x_star = x;
        sol.residual = res;
        return sol;
      }
      if (res < 0.99 * best_residual) {
        best_residual = res;
        stall = 0;
      } else if (++stall >= 256) {
        step *= 0.5;  // overshooting; contract
        stall = 0;
      }
    }
  }
  throw ConvergenceError("solve_ne_vi: residual " +
                         std::to_string(best_residual) +
                         " above tol after iteration budget");
}

// Regularized logistic regression: Nesterov's accelerated gradient with
// gradient restarts; the unique minimizer of f is the game's Nash
// equilibrium. Stops at ||grad f|| <= 1e-10.
inline NeSolution solve_ne_logistic(const games::LogisticGameParams& p) {
  if (!p.dataset) throw ParamError("solve_ne_logistic: missing dataset");
  const auto& data = *p.dataset;
  const double mu = p.mu;
  const double ell = games::logistic_smoothness(data);
  const double lip = ell + 2.0 * mu;
  const double strong = 2.0 * mu;
  const double kappa = lip / strong;
  const double momentum =
      (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);

  const int n = data.n();
  Vec x = Vec::Zero(n), y = x, x_prev = x;
  NeSolution sol;
  sol.solver = "logistic-agd";
  constexpr long kMaxIter = 2000000;
  for (long it = 1; it <= kMaxIter; ++it) {
    const Vec g = games::logistic_gradient(data, mu, y);
    x = y - g / lip;
    const Vec diff = x - x_prev;
    // Gradient restart: drop momentum when it points uphill.
    y = (g.dot(diff) > 0) ? x : x + momentum * diff;
    x_prev = x;
    if (it % 8 == 0) {
      const double gnorm = games::logistic_gradient(data, mu, x).norm();
      if (gnorm <= 1e-10) {
        sol.iterations = it;
        sol.x_star = x;
        sol.residual = gnorm;
        return sol;
      }
    }
  }
  throw ConvergenceError("solve_ne_logistic: no convergence in iteration budget");
}

}  // namespace mbg::equilibrium
