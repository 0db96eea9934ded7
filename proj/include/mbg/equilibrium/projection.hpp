#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "mbg/geometry/barrier.hpp"

namespace mbg::equilibrium {

using geometry::Barrier;
using geometry::BarrierKind;
using geometry::Vec;

inline Vec project_box(const Vec& lower, const Vec& upper, const Vec& y) {
  return y.cwiseMax(lower).cwiseMin(upper);
}

// Euclidean projection onto {x >= 0, sum x <= B}. Clamping negatives suffices
// when the budget then holds; otherwise the KKT threshold tau solves
// sum max(0, y - tau) = B, found by the sort-based water-filling pass.
inline Vec project_budget_simplex(double budget, const Vec& y) {
  Vec clamped = y.cwiseMax(0.0);
  if (clamped.sum() <= budget) return clamped;
  std::vector<double> sorted(y.data(), y.data() + y.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0;
  double tau = 0;
  const int n = static_cast<int>(sorted.size());
  for (int k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double cand = (cumulative - budget) / (k + 1);
    if (k + 1 == n || sorted[k + 1] <= cand) {
      tau = cand;
      break;
    }
  }
  return (y.array() - tau).max(0.0).matrix();
}

inline Vec project_ball(double radius, const Vec& y) {
  const double nrm = y.norm();
  if (nrm <= radius) return y;
  return y * (radius / nrm);
}

// Projection onto the feasible set described by a barrier.
inline Vec project(const Barrier& domain, const Vec& y) {
  switch (domain.kind()) {
    case BarrierKind::Box:
      return project_box(domain.lower(), domain.upper(), y);
    case BarrierKind::BudgetSimplex:
      return project_budget_simplex(domain.budget(), y);
    case BarrierKind::Ball:
      return project_ball(domain.radius(), y);
    case BarrierKind::Zero:
      return y;
  }
  return y;
}

}  // namespace mbg::equilibrium
