#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <utility>

#include "mbg/errors.hpp"
#include "mbg/geometry/scaling.hpp"
#include "mbg/sampling/rng.hpp"

namespace mbg::sampling {

using geometry::Mat;
using geometry::ScalingMatrix;
using geometry::Vec;

// Uniform draw from the unit sphere S^n: normalized Gaussian vector,
// redrawn in the (measure-zero) event of a tiny norm.
inline Vec sample_sphere(RngStream& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec z(n);
  while (true) {
    for (int k = 0; k < n; ++k) z[k] = gauss(rng);
    const double nrm = z.norm();
    if (nrm >= 1e-12) return z / nrm;
  }
}

// One single-shot estimator draw: the perturbation direction, the point
// actually played, the received scalar payoff and the gradient estimate
// v = n * payoff * A^{-1} z.
struct EstimatorSample {
  Vec z;
  Vec played;
  double payoff = 0;
  Vec v_hat;
};

using ScalarOracle = std::function<double(const Vec&)>;
using FeasibilityCheck = std::function<bool(const Vec&)>;

inline EstimatorSample ellipsoidal_estimate(const ScalarOracle& f, const Vec& x,
                                            const ScalingMatrix& a,
                                            RngStream& rng,
                                            const FeasibilityCheck& feasible = {}) {
  const int n = static_cast<int>(x.size());
  EstimatorSample s;
  s.z = sample_sphere(rng, n);
  s.played = x + a.apply(s.z);
  if (feasible && !feasible(s.played))
    throw FeasibilityError("ellipsoidal estimate: played point infeasible");
  s.payoff = f(s.played);
  s.v_hat = static_cast<double>(n) * s.payoff * a.apply_inverse(s.z);
  return s;
}

inline EstimatorSample spherical_estimate(const ScalarOracle& f, const Vec& x,
                                          double delta, RngStream& rng,
                                          const FeasibilityCheck& feasible = {}) {
  if (!(delta > 0)) throw ParamError("spherical estimate: delta must be > 0");
  const int n = static_cast<int>(x.size());
  EstimatorSample s;
  s.z = sample_sphere(rng, n);
  s.played = x + delta * s.z;
  if (feasible && !feasible(s.played))
    throw FeasibilityError("spherical estimate: played point infeasible");
  s.payoff = f(s.played);
  s.v_hat = (static_cast<double>(n) / delta) * s.payoff * s.z;
  return s;
}

// Payoff-observation noise: exact when sigma == 0, otherwise i.i.d.
// Uniform[-sigma, sigma] (zero mean, bounded by sigma).
struct NoiseModel {
  double sigma = 0;

  bool enabled() const { return sigma > 0; }

  double draw(RngStream& rng) const {
    if (sigma <= 0) return 0.0;
    std::uniform_real_distribution<double> u(-sigma, sigma);
    return u(rng);
  }
};

}  // namespace mbg::sampling
