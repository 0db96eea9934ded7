#pragma once

#include <vector>

#include "mbg/games/game.hpp"
#include "mbg/sampling/estimators.hpp"

namespace mbg::sampling {

// One simultaneous-perturbation round with per-player ellipsoidal scalings:
// every player draws z_i independently, the joint perturbed profile is played
// once, and each player builds v_i = n_i * u_i(played) * A_i^{-1} z_i from its
// own scalar payoff.
inline std::vector<EstimatorSample> spsa_ellipsoidal_round(
    const games::Game& game, const std::vector<Vec>& pivots,
    const std::vector<ScalingMatrix>& scalings, std::vector<RngStream>& rngs,
    const NoiseModel& noise, std::vector<RngStream>* noise_rngs = nullptr) {
  const int n_players = game.num_players;
  std::vector<EstimatorSample> out(n_players);
  Vec joint(game.total_dim);
  for (int i = 0; i < n_players; ++i) {
    out[i].z = sample_sphere(rngs[i], game.dims[i]);
    out[i].played = pivots[i] + scalings[i].apply(out[i].z);
    if (!game.domains[i].is_feasible(out[i].played, 1e-9))
      throw FeasibilityError("spsa ellipsoidal round: player " +
                             std::to_string(i) + " played infeasible point");
    joint.segment(game.offsets[i], game.dims[i]) = out[i].played;
  }
  const Vec u = game.payoffs(joint);
  for (int i = 0; i < n_players; ++i) {
    double xi = 0;
    if (noise.enabled())
      xi = noise.draw(noise_rngs ? (*noise_rngs)[i] : rngs[i]);
    out[i].payoff = u[i] + xi;
    out[i].v_hat = static_cast<double>(game.dims[i]) * out[i].payoff *
                   scalings[i].apply_inverse(out[i].z);
  }
  return out;
}

// Feasibility adjustment data for the spherical SPSA baseline: a ball
// B(anchor, radius) contained in the player's action set (radius may be
// infinite for unconstrained sets).
struct SphericalFeasibility {
  Vec anchor;
  double radius = 0;  // > 0, or +infinity
};

// Spherical SPSA round with the baseline's action rule
//   played_i = x_i + delta * (z_i - (x_i - anchor_i)/radius_i),
// followed by one joint payoff evaluation and v_i = (n_i/delta) * u_i * z_i.
inline std::vector<EstimatorSample> spsa_spherical_round(
    const games::Game& game, const std::vector<Vec>& pivots, double delta,
    const std::vector<SphericalFeasibility>& feas, std::vector<RngStream>& rngs,
    const NoiseModel& noise, std::vector<RngStream>* noise_rngs = nullptr) {
  if (!(delta > 0)) throw ParamError("spsa spherical round: delta must be > 0");
  const int n_players = game.num_players;
  std::vector<EstimatorSample> out(n_players);
  Vec joint(game.total_dim);
  for (int i = 0; i < n_players; ++i) {
    if (std::isfinite(feas[i].radius) && delta > feas[i].radius + 1e-12)
      throw ParamError("spsa spherical round: delta exceeds feasibility radius");
    out[i].z = sample_sphere(rngs[i], game.dims[i]);
    Vec adjust = Vec::Zero(game.dims[i]);
    if (std::isfinite(feas[i].radius))
      adjust = (pivots[i] - feas[i].anchor) / feas[i].radius;
    out[i].played = pivots[i] + delta * (out[i].z - adjust);
    if (!game.domains[i].is_feasible(out[i].played, 1e-9))
      throw FeasibilityError("spsa spherical round: player " +
                             std::to_string(i) + " played infeasible point");
    joint.segment(game.offsets[i], game.dims[i]) = out[i].played;
  }
  const Vec u = game.payoffs(joint);
  for (int i = 0; i < n_players; ++i) {
    double xi = 0;
    if (noise.enabled())
      xi = noise.draw(noise_rngs ? (*noise_rngs)[i] : rngs[i]);
    out[i].payoff = u[i] + xi;
    out[i].v_hat =
        (static_cast<double>(game.dims[i]) / delta) * out[i].payoff * out[i].z;
  }
  return out;
}

}  // namespace mbg::sampling
