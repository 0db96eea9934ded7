#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mbg/equilibrium/projection.hpp"
#include "mbg/harness/records.hpp"
#include "mbg/learners/learners.hpp"

namespace mbg::harness {

using geometry::Barrier;
using geometry::Vec;

// Single-agent regret benchmark against a seeded oblivious adversary playing
// beta-strongly-concave quadratics f_t(x) = -(beta/2) ||x - theta_t||^2 with
// theta_t drawn uniformly from the box.
struct RegretConfig {
  Vec box_lower = Vec::Zero(2);
  Vec box_upper = Vec::Ones(2);
  double beta = 1.0;
  std::vector<long> horizons = {100, 1000, 10000, 100000};
  int trials = 10;
  std::uint64_t seed = 0;
  // Overrides the seeded uniform draws (e.g. a constant adversary).
  std::function<Vec(long)> theta_override;
};

struct RegretRecord {
  long t = 0;                    // horizon of this run
  int trial = 0;
  double cum_realized = 0;       // sum_t f_t(played_t)
  double best_fixed_payoff = 0;  // max_x sum_t f_t(x), exact for quadratics
  double regret = 0;
};

// sup |f_t| over the box, valid for every theta_t in the box.
inline double regret_payoff_bound(const RegretConfig& cfg) {
  return 0.5 * cfg.beta * (cfg.box_upper - cfg.box_lower).squaredNorm();
}

namespace detail {
inline constexpr std::uint64_t kAdversaryTag = 0x61647665;
}

inline std::vector<RegretRecord> run_regret_experiment(const RegretConfig& cfg) {
  const int n = static_cast<int>(cfg.box_lower.size());
  const Barrier box = Barrier::box(cfg.box_lower, cfg.box_upper);
  const double payoff_bound = regret_payoff_bound(cfg);

  std::vector<RegretRecord> out;
  for (long horizon : cfg.horizons) {
    for (int trial = 0; trial < cfg.trials; ++trial) {
      sampling::RngStream rng(cfg.seed, trial, 0);
      sampling::RngStream adversary =
          rng.substream(static_cast<std::uint64_t>(horizon), detail::kAdversaryTag);
      std::uniform_real_distribution<double> u01(0.0, 1.0);

      learners::BarrierLearnerConfig lcfg;
      lcfg.beta = cfg.beta;
      lcfg.lambda = 1.0;
      lcfg.barrier = box;
      lcfg.schedule = learners::StepSchedule::constant(
          1.0 / (2.0 * n * payoff_bound * std::sqrt(static_cast<double>(horizon))));
      auto state = learners::barrier_learner_init(lcfg);

      double realized = 0;
      Vec theta_sum = Vec::Zero(n);
      double theta_sq_sum = 0;
      for (long t = 1; t <= horizon; ++t) {
        Vec theta(n);
        if (cfg.theta_override) {
          theta = cfg.theta_override(t);
        } else {
          for (int k = 0; k < n; ++k)
            theta[k] = cfg.box_lower[k] +
                       u01(adversary) * (cfg.box_upper[k] - cfg.box_lower[k]);
        }
        theta_sum += theta;
        theta_sq_sum += theta.squaredNorm();

        const Vec played = learners::barrier_learner_act(state, lcfg, rng);
        const double payoff = -0.5 * cfg.beta * (played - theta).squaredNorm();
        realized += payoff;
        learners::barrier_learner_update(state, lcfg, payoff);
      }

      // Best fixed action: the average of f_t is maximized over the box at
      // the clipped mean of theta_t; its cumulative payoff expands as
      //   -(beta/2) (T ||x||^2 - 2 x.theta_sum + theta_sq_sum).
      const Vec best =
          equilibrium::project_box(cfg.box_lower, cfg.box_upper,
                                   (theta_sum / static_cast<double>(horizon)).eval());
      const double best_payoff =
          -0.5 * cfg.beta *
          (horizon * best.squaredNorm() - 2.0 * best.dot(theta_sum) + theta_sq_sum);

      RegretRecord rec;
      rec.t = horizon;
      rec.trial = trial;
      rec.cum_realized = realized;
      rec.best_fixed_payoff = best_payoff;
      rec.regret = best_payoff - realized;
      out.push_back(rec);
    }
  }
  return out;
}

// Least-squares slope of log(mean regret) against log horizon.
inline double fit_regret_slope(const std::vector<RegretRecord>& records) {
  std::map<long, std::pair<double, int>> by_t;
  for (const auto& r : records) {
    auto& acc = by_t[r.t];
    acc.first += r.regret;
    acc.second += 1;
  }
  if (by_t.size() < 2)
    throw InsufficientDataError("fit_regret_slope: need >= 2 horizons");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [t, acc] : by_t) {
    const double mean = acc.first / acc.second;
    if (mean <= 0)
      throw InsufficientDataError("fit_regret_slope: nonpositive mean regret");
    const double x = std::log(static_cast<double>(t)), y = std::log(mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mbg::harness
