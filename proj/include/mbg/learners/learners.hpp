#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mbg/equilibrium/projection.hpp"
#include "mbg/games/game.hpp"
#include "mbg/geometry/prox.hpp"
#include "mbg/geometry/scaling.hpp"
#include "mbg/sampling/spsa.hpp"

namespace mbg::learners {

using games::Game;
using geometry::Barrier;
using geometry::ProxProblem;
using geometry::ScalingMatrix;
using geometry::Vec;
using sampling::EstimatorSample;
using sampling::NoiseModel;
using sampling::RngStream;

// Step-size sequence eta_t. Positive and nonincreasing in t.
class StepSchedule {
public:
  StepSchedule() = default;

  // eta_t fixed over the whole horizon (e.g. 1/(2 n L sqrt(T))).
  static StepSchedule constant(double eta) {
    if (!(eta > 0)) throw ParamError("schedule: eta must be > 0");
    return StepSchedule([eta](long) { return eta; });
  }

  // eta_t = scale / sqrt(t).
  static StepSchedule inverse_sqrt(double scale) {
    if (!(scale > 0)) throw ParamError("schedule: scale must be > 0");
    return StepSchedule(
        [scale](long t) { return scale / std::sqrt(static_cast<double>(t)); });
  }

  static StepSchedule custom(std::function<double(long)> fn) {
    return StepSchedule(std::move(fn));
  }

  double at(long t) const {
    const double eta = fn_(t);
    if (!(eta > 0)) throw ParamError("schedule: eta_t must be > 0");
    return eta;
  }

private:
  explicit StepSchedule(std::function<double(long)> fn) : fn_(std::move(fn)) {}
  std::function<double(long)> fn_ = [](long) { return 1.0; };
};

struct BarrierLearnerConfig {
  double beta = 0;     // strong-concavity / monotonicity modulus
  double lambda = 1;   // player weight
  StepSchedule schedule;
  Barrier barrier = Barrier::zero(1);
  double noise_sigma = 0;

  void validate() const {
    if (!(beta > 0)) throw ParamError("learner config: beta must be > 0");
    if (!(lambda > 0)) throw ParamError("learner config: lambda must be > 0");
    if (noise_sigma < 0) throw ParamError("learner config: sigma must be >= 0");
  }
};

// One player's state machine: round counter, interior pivot, and the scaling
// and draw retained between the act and update phases of a round.
struct LearnerState {
  long t = 1;
  Vec pivot;
  std::optional<ScalingMatrix> last_scaling;
  std::optional<EstimatorSample> last_sample;
  long safety_warnings = 0;
  bool acted = false;
};

inline LearnerState barrier_learner_init(const BarrierLearnerConfig& cfg) {
  cfg.validate();
  LearnerState s;
  s.pivot = cfg.barrier.analytic_center();
  return s;
}

inline double barrier_regularization(const BarrierLearnerConfig& cfg, long t) {
  return cfg.schedule.at(t) * cfg.beta * (t + 1) / cfg.lambda;
}

// Act phase with a caller-supplied draw (deterministic replay and tests).
inline Vec barrier_learner_act_with_draw(LearnerState& state,
                                         const BarrierLearnerConfig& cfg,
                                         Vec z) {
  if (state.acted) throw ParamError("learner act: round already has a pending draw");
  const double c = barrier_regularization(cfg, state.t);
  ScalingMatrix a = geometry::scaling_matrix(cfg.barrier, state.pivot, c);
  EstimatorSample sample;
  sample.z = std::move(z);
  sample.played = state.pivot + a.apply(sample.z);
  if (!cfg.barrier.is_feasible(sample.played, 1e-9))
    throw FeasibilityError("learner act: played point left the action set");
  state.last_scaling = std::move(a);
  state.last_sample = std::move(sample);
  state.acted = true;
  return state.last_sample->played;
}

// Act phase: A_t = (hess R(x_t) + eta_t beta (t+1)/lambda I)^{-1/2}, draw z on
// the unit sphere and play x_t + A_t z. The played point stays feasible since
// A_t is dominated by the Dikin scaling; this is asserted.
inline Vec barrier_learner_act(LearnerState& state,
                               const BarrierLearnerConfig& cfg, RngStream& rng) {
  return barrier_learner_act_with_draw(
      state, cfg, sampling::sample_sphere(rng, cfg.barrier.dim()));
}

// Update phase: v_t = n * payoff * A_t^{-1} z, then the mixed-Bregman prox
// from the current pivot. The step-size safety condition
// eta_t * n * |payoff| <= 1/2 required by the descent analysis is counted as
// a warning when violated, not enforced.
inline void barrier_learner_update(LearnerState& state,
                                   const BarrierLearnerConfig& cfg,
                                   double payoff) {
  if (!state.acted) throw ParamError("learner update: act was not called");
  const long t = state.t;
  const double eta = cfg.schedule.at(t);
  const int n = cfg.barrier.dim();
  EstimatorSample& sample = *state.last_sample;
  sample.payoff = payoff;
  sample.v_hat =
      static_cast<double>(n) * payoff * state.last_scaling->apply_inverse(sample.z);

  if (eta * n * std::abs(payoff) > 0.5 + 1e-12) ++state.safety_warnings;

  ProxProblem prox;
  prox.pivot = state.pivot;
  prox.direction = sample.v_hat;
  prox.eta = eta;
  prox.quad_coef = barrier_regularization(cfg, t);
  prox.barrier = &cfg.barrier;
  state.pivot = geometry::prox_step(prox);
  state.t = t + 1;
  state.acted = false;
}

// Instrumentation record for one multi-agent round; only assembled when an
// observer is installed.
struct RoundRecord {
  long t = 0;
  double eta = 0;
  std::vector<Vec> pivot_before, pivot_after, played, v_hat;
  std::vector<double> payoffs, quad_coefs, sigma_max;
};

using RoundObserver = std::function<void(const RoundRecord&)>;

struct MultiAgentRoundResult {
  std::vector<Vec> played;
  Vec payoffs;  // scalars each learner received (noise included)
};

// One synchronous round of the multi-agent learner: all players act, the game
// is evaluated once at the joint played profile, each player receives exactly
// its own scalar payoff (plus optional bounded noise) and updates.
inline MultiAgentRoundResult multi_agent_round(
    std::vector<LearnerState>& states, const std::vector<BarrierLearnerConfig>& cfgs,
    const Game& game, std::vector<RngStream>& rngs, const NoiseModel& noise,
    std::vector<RngStream>* noise_rngs = nullptr,
    const RoundObserver& observer = {}) {
  const int n_players = game.num_players;
  MultiAgentRoundResult result;
  result.played.resize(n_players);

  RoundRecord record;
  if (observer) {
    record.t = states[0].t;
    record.eta = cfgs[0].schedule.at(states[0].t);
    record.pivot_before.resize(n_players);
  }

  Vec joint(game.total_dim);
  for (int i = 0; i < n_players; ++i) {
    if (observer) record.pivot_before[i] = states[i].pivot;
    result.played[i] = barrier_learner_act(states[i], cfgs[i], rngs[i]);
    joint.segment(game.offsets[i], game.dims[i]) = result.played[i];
  }

  const Vec u = game.payoffs(joint);
  result.payoffs = u;
  for (int i = 0; i < n_players; ++i) {
    if (noise.enabled())
      result.payoffs[i] += noise.draw(noise_rngs ? (*noise_rngs)[i] : rngs[i]);
  }

  if (observer) {
    record.quad_coefs.resize(n_players);
    record.sigma_max.resize(n_players);
    for (int i = 0; i < n_players; ++i) {
      record.quad_coefs[i] = barrier_regularization(cfgs[i], states[i].t);
      record.sigma_max[i] = states[i].last_scaling->sigma_max();
    }
  }

  for (int i = 0; i < n_players; ++i)
    barrier_learner_update(states[i], cfgs[i], result.payoffs[i]);

  if (observer) {
    record.pivot_after.resize(n_players);
    record.played = result.played;
    record.v_hat.resize(n_players);
    record.payoffs.assign(result.payoffs.data(),
                          result.payoffs.data() + n_players);
    for (int i = 0; i < n_players; ++i) {
      record.pivot_after[i] = states[i].pivot;
      record.v_hat[i] = states[i].last_sample->v_hat;
    }
    observer(record);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Spherical-SPSA baseline (projected gradient from single-shot spherical
// estimates). Anchor/radius give the feasibility adjustment ball
// B(anchor, radius) contained in the action set.
// ---------------------------------------------------------------------------
struct FkmLearnerConfig {
  Vec anchor;
  double radius = 0;  // may be +infinity for unconstrained sets
  std::function<double(long)> delta_schedule;
  std::function<double(long)> gamma_schedule;
};

struct FkmState {
  long t = 1;
  Vec pivot;
};

inline std::vector<FkmState> fkm_init(const std::vector<FkmLearnerConfig>& cfgs) {
  std::vector<FkmState> states(cfgs.size());
  for (std::size_t i = 0; i < cfgs.size(); ++i) states[i].pivot = cfgs[i].anchor;
  return states;
}

inline std::vector<EstimatorSample> fkm_round(
    std::vector<FkmState>& states, const std::vector<FkmLearnerConfig>& cfgs,
    const Game& game, std::vector<RngStream>& rngs, const NoiseModel& noise,
    std::vector<RngStream>* noise_rngs = nullptr) {
  const int n_players = game.num_players;
  const long t = states[0].t;
  const double delta = cfgs[0].delta_schedule(t);
  const double gamma = cfgs[0].gamma_schedule(t);

  std::vector<Vec> pivots(n_players);
  std::vector<sampling::SphericalFeasibility> feas(n_players);
  for (int i = 0; i < n_players; ++i) {
    pivots[i] = states[i].pivot;
    feas[i] = {cfgs[i].anchor, cfgs[i].radius};
  }
  auto samples = sampling::spsa_spherical_round(game, pivots, delta, feas, rngs,
                                                noise, noise_rngs);
  for (int i = 0; i < n_players; ++i) {
    states[i].pivot = equilibrium::project(
        game.domains[i], states[i].pivot + gamma * samples[i].v_hat);
    states[i].t = t + 1;
  }
  return samples;
}

}  // namespace mbg::learners
