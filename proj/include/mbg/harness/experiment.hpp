#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbg/equilibrium/solvers.hpp"
#include "mbg/games/families.hpp"
#include "mbg/harness/records.hpp"
#include "mbg/learners/learners.hpp"

namespace mbg::harness {

using games::Game;
using geometry::Vec;
using learners::StepSchedule;

using GameSpec = std::variant<games::CournotParams, games::KellyParams,
                              games::LogisticGameParams>;

enum class Algorithm { Barrier, Fkm };

inline std::string algorithm_name(Algorithm a) {
  return a == Algorithm::Barrier ? "barrier" : "fkm";
}

struct ExperimentConfig {
  GameSpec game;
  Algorithm algo = Algorithm::Barrier;
  long horizon = 100000;
  int trials = 10;
  std::uint64_t seed = 0;
  double noise_sigma = 0;
  int workers = 1;
  double checkpoint_ratio = 1.25;
  std::optional<StepSchedule> schedule_override;
  std::string csv_path;   // written when nonempty
  std::string json_path;  // written when nonempty

  void validate() const {
    if (horizon < 1) throw ParamError("experiment: horizon must be >= 1");
    if (trials < 1) throw ParamError("experiment: trials must be >= 1");
    if (workers < 1) throw ParamError("experiment: workers must be >= 1");
    if (noise_sigma < 0) throw ParamError("experiment: sigma must be >= 0");
  }
};

struct ExperimentSummary {
  double final_mean = 0;
  double final_std = 0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double runtime_seconds = 0;
};

struct ExperimentResult {
  std::vector<TrajectoryRecord> records;
  ExperimentSummary summary;
  equilibrium::NeSolution reference;
  Game game;
};

// ---------------------------------------------------------------------------
// Per-family experiment setup: the benchmark's published parameter choices.
// ---------------------------------------------------------------------------

// Barrier-algorithm step schedule. Cournot runs eta_t = 1/(20 sqrt t); under
// payoff noise the denominator constant grows by 2*n*sigma, replacing L with
// L + sigma in the schedule while keeping the noise-free constant intact.
inline StepSchedule default_barrier_schedule(const GameSpec& spec, double sigma) {
  if (std::holds_alternative<games::CournotParams>(spec)) {
    const auto& p = std::get<games::CournotParams>(spec);
    return StepSchedule::inverse_sqrt(1.0 / (20.0 + 2.0 * p.num_players * sigma));
  }
  if (std::holds_alternative<games::KellyParams>(spec)) {
    const auto& p = std::get<games::KellyParams>(spec);
    const double ratio = (p.entry.array() / p.capacities.array()).minCoeff();
    const double scale =
        1.0 / (2.0 * std::sqrt(p.num_players * p.num_resources * (1.0 + ratio)));
    return StepSchedule::inverse_sqrt(scale);
  }
  const auto& p = std::get<games::LogisticGameParams>(spec);
  const double ell = games::logistic_smoothness(*p.dataset);
  const double n = p.dataset->n();
  return StepSchedule::custom(
      [ell, n](long t) { return 1.0 / (ell + 2.0 * std::sqrt(n * t)); });
}

inline std::vector<learners::BarrierLearnerConfig> barrier_configs(
    const Game& game, const GameSpec& spec, const StepSchedule& schedule,
    double sigma) {
  std::vector<learners::BarrierLearnerConfig> cfgs(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    auto& c = cfgs[i];
    c.schedule = schedule;
    c.barrier = game.domains[i];
    c.noise_sigma = sigma;
    if (game.family == "cournot") {
      c.beta = std::get<games::CournotParams>(spec).b;
      c.lambda = 1.0;
    } else if (game.family == "kelly") {
      c.beta = game.beta;
      c.lambda = 1.0 / std::get<games::KellyParams>(spec).gains[i];
    } else {  // logistic: algorithm weights lambda_i = beta = 2 mu
      const double mu = std::get<games::LogisticGameParams>(spec).mu;
      c.beta = 2.0 * mu;
      c.lambda = 2.0 * mu;
    }
  }
  return cfgs;
}

inline std::vector<learners::FkmLearnerConfig> fkm_configs(const Game& game,
                                                           const GameSpec& spec) {
  const int n_players = game.num_players;
  std::vector<learners::FkmLearnerConfig> cfgs(n_players);

  double min_radius = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_players; ++i) {
    auto& c = cfgs[i];
    if (game.family == "cournot") {
      const double cap = std::get<games::CournotParams>(spec).capacities[i];
      c.anchor = Vec::Constant(1, cap / 2.0);
      c.radius = cap / 2.0;
    } else if (game.family == "kelly") {
      const auto& p = std::get<games::KellyParams>(spec);
      const double budget = p.budgets[i];
      const int s = p.num_resources;
      // Anchor at the simplex's analytic center so B(anchor, radius) stays
      // inside {x >= 0, sum x <= B}; radius keeps the published value.
      c.anchor = Vec::Constant(s, budget / (s + 1.0));
      c.radius = budget / (static_cast<double>(s) * (s + 1.0));
    } else {
      c.anchor = Vec::Zero(game.dims[i]);
      c.radius = std::numeric_limits<double>::infinity();
    }
    min_radius = std::min(min_radius, c.radius);
  }

  std::function<double(long)> delta, gamma;
  if (game.family == "logistic") {
    const auto& p = std::get<games::LogisticGameParams>(spec);
    const double ell = games::logistic_smoothness(*p.dataset);
    delta = [](long t) { return std::pow(static_cast<double>(t), -1.0 / 3.0); };
    gamma = [ell](long t) { return 1.0 / (ell + 10.0 * t); };
  } else {
    const double beta =
        game.family == "cournot" ? std::get<games::CournotParams>(spec).b
                                 : game.beta;
    delta = [min_radius](long t) {
      return std::min(min_radius, std::pow(static_cast<double>(t), -1.0 / 3.0));
    };
    gamma = [beta](long t) { return 1.0 / (5.0 * beta * t); };
  }
  for (auto& c : cfgs) {
    c.delta_schedule = delta;
    c.gamma_schedule = gamma;
  }
  return cfgs;
}

inline Game build_game(const GameSpec& spec) {
  if (std::holds_alternative<games::CournotParams>(spec))
    return games::cournot_build(std::get<games::CournotParams>(spec));
  if (std::holds_alternative<games::KellyParams>(spec))
    return games::kelly_build(std::get<games::KellyParams>(spec));
  return games::logistic_build(std::get<games::LogisticGameParams>(spec));
}

inline equilibrium::NeSolution solve_reference(const Game& game,
                                               const GameSpec& spec) {
  if (std::holds_alternative<games::CournotParams>(spec))
    return equilibrium::solve_ne_cournot(std::get<games::CournotParams>(spec));
  if (std::holds_alternative<games::KellyParams>(spec))
    return equilibrium::solve_ne_vi(game);
  return equilibrium::solve_ne_logistic(std::get<games::LogisticGameParams>(spec));
}

namespace detail {

inline constexpr std::uint64_t kNoiseTag = 0x6e6f6973;  // noise substream

inline double profile_dist_sq(const Game& game, const std::vector<Vec>& pts,
                              const Vec& x_star) {
  double acc = 0;
  for (int i = 0; i < game.num_players; ++i)
    acc += (pts[i] - x_star.segment(game.offsets[i], game.dims[i])).squaredNorm();
  return acc;
}

// Runs trial indices [0, trials) across up to `workers` threads; fn must be
// pure per trial (results land in per-trial slots).
template <typename Fn>
void parallel_trials(int trials, int workers, Fn&& fn) {
  const int active = std::max(1, std::min(workers, trials));
  if (active == 1) {
    for (int k = 0; k < trials; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(active);
  for (int w = 0; w < active; ++w)
    pool.emplace_back([&]() {
      while (true) {
        const int k = next.fetch_add(1);
        if (k >= trials) return;
        try {
          fn(k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

inline nlohmann::json summary_json(const ExperimentConfig& cfg,
                                   const ExperimentResult& result);

// Runs the configured experiment: fresh per-trial streams, learners started
// from the analytic centers, geometric checkpoints, mean +/- sample-std of
// the final played distance over trials.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  ExperimentResult result;
  result.game = build_game(cfg.game);
  result.reference = solve_reference(result.game, cfg.game);
  const Game& game = result.game;
  const Vec& x_star = result.reference.x_star;

  const auto checkpoints = checkpoint_rounds(cfg.horizon, cfg.checkpoint_ratio);
  const StepSchedule schedule =
      cfg.schedule_override ? *cfg.schedule_override
                            : default_barrier_schedule(cfg.game, cfg.noise_sigma);
  const auto barrier_cfgs =
      barrier_configs(game, cfg.game, schedule, cfg.noise_sigma);
  const auto fkm_cfgs = fkm_configs(game, cfg.game);
  const sampling::NoiseModel noise{cfg.noise_sigma};

  std::vector<std::vector<TrajectoryRecord>> per_trial(cfg.trials);

  auto run_trial = [&](int trial) {
    std::vector<sampling::RngStream> rngs, noise_rngs;
    rngs.reserve(game.num_players);
    noise_rngs.reserve(game.num_players);
    for (int i = 0; i < game.num_players; ++i) {
      rngs.emplace_back(cfg.seed, static_cast<std::uint64_t>(trial),
                        static_cast<std::uint64_t>(i));
      noise_rngs.push_back(rngs.back().substream(1, detail::kNoiseTag));
    }

    auto& records = per_trial[trial];
    records.reserve(checkpoints.size());
    std::size_t next_cp = 0;

    if (cfg.algo == Algorithm::Barrier) {
      std::vector<learners::LearnerState> states;
      states.reserve(game.num_players);
      for (int i = 0; i < game.num_players; ++i)
        states.push_back(learners::barrier_learner_init(barrier_cfgs[i]));
      for (long t = 1; t <= cfg.horizon; ++t) {
        const bool checkpoint =
            next_cp < checkpoints.size() && checkpoints[next_cp] == t;
        std::vector<Vec> pivots;
        if (checkpoint) {
          pivots.reserve(game.num_players);
          for (const auto& s : states) pivots.push_back(s.pivot);
        }
        auto round = learners::multi_agent_round(states, barrier_cfgs, game,
                                                 rngs, noise, &noise_rngs);
        if (checkpoint) {
          long warnings = 0;
          for (const auto& s : states) warnings += s.safety_warnings;
          records.push_back(
              {trial, t, detail::profile_dist_sq(game, round.played, x_star),
               detail::profile_dist_sq(game, pivots, x_star), warnings});
          ++next_cp;
        }
      }
    } else {
      auto states = learners::fkm_init(fkm_cfgs);
      for (long t = 1; t <= cfg.horizon; ++t) {
        const bool checkpoint =
            next_cp < checkpoints.size() && checkpoints[next_cp] == t;
        std::vector<Vec> pivots;
        if (checkpoint) {
          pivots.reserve(game.num_players);
          for (const auto& s : states) pivots.push_back(s.pivot);
        }
        auto samples =
            learners::fkm_round(states, fkm_cfgs, game, rngs, noise, &noise_rngs);
        if (checkpoint) {
          std::vector<Vec> played;
          played.reserve(game.num_players);
          for (const auto& s : samples) played.push_back(s.played);
          records.push_back(
              {trial, t, detail::profile_dist_sq(game, played, x_star),
               detail::profile_dist_sq(game, pivots, x_star), 0});
          ++next_cp;
        }
      }
    }
  };

  detail::parallel_trials(cfg.trials, cfg.workers, run_trial);

  std::vector<double> finals;
  finals.reserve(cfg.trials);
  for (int k = 0; k < cfg.trials; ++k) {
    for (const auto& r : per_trial[k]) result.records.push_back(r);
    finals.push_back(per_trial[k].back().dist_sq_played);
  }
  result.summary.final_mean = mean_of(finals);
  result.summary.final_std = sample_std(finals);
  try {
    result.summary.slope = fit_rate(result.records);
  } catch (const InsufficientDataError&) {
    // short runs have no rate estimate
  }
  result.summary.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  if (!cfg.csv_path.empty()) {
    std::ofstream os(cfg.csv_path, std::ios::binary);
    if (!os) throw ParamError("experiment: cannot open '" + cfg.csv_path + "'");
    write_records_csv(os, result.records);
  }
  if (!cfg.json_path.empty()) {
    std::ofstream os(cfg.json_path, std::ios::binary);
    if (!os) throw ParamError("experiment: cannot open '" + cfg.json_path + "'");
    os << summary_json(cfg, result).dump(2) << '\n';
  }
  return result;
}

inline nlohmann::json game_spec_json(const GameSpec& spec) {
  nlohmann::json j;
  if (std::holds_alternative<games::CournotParams>(spec)) {
    const auto& p = std::get<games::CournotParams>(spec);
    j["family"] = "cournot";
    j["N"] = p.num_players;
    j["a"] = p.a;
    j["b"] = p.b;
    j["capacities"] = std::vector<double>(p.capacities.data(),
                                          p.capacities.data() + p.capacities.size());
    j["costs"] =
        std::vector<double>(p.costs.data(), p.costs.data() + p.costs.size());
  } else if (std::holds_alternative<games::KellyParams>(spec)) {
    const auto& p = std::get<games::KellyParams>(spec);
    j["family"] = "kelly";
    j["N"] = p.num_players;
    j["S"] = p.num_resources;
    j["gains"] =
        std::vector<double>(p.gains.data(), p.gains.data() + p.gains.size());
    j["capacities"] = std::vector<double>(p.capacities.data(),
                                          p.capacities.data() + p.capacities.size());
    j["entry"] =
        std::vector<double>(p.entry.data(), p.entry.data() + p.entry.size());
    j["budgets"] =
        std::vector<double>(p.budgets.data(), p.budgets.data() + p.budgets.size());
  } else {
    const auto& p = std::get<games::LogisticGameParams>(spec);
    j["family"] = "logistic";
    j["m"] = p.dataset->m();
    j["n"] = p.dataset->n();
    j["mu"] = p.mu;
  }
  return j;
}

inline nlohmann::json summary_json(const ExperimentConfig& cfg,
                                   const ExperimentResult& result) {
  nlohmann::json j;
  j["game"] = game_spec_json(cfg.game);
  j["algorithm"] = algorithm_name(cfg.algo);
  j["T"] = cfg.horizon;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["noise_sigma"] = cfg.noise_sigma;
  j["final_mean"] = result.summary.final_mean;
  j["final_std"] = result.summary.final_std;
  if (std::isfinite(result.summary.slope)) j["slope"] = result.summary.slope;
  else j["slope"] = nullptr;
  j["runtime_seconds"] = result.summary.runtime_seconds;
  return j;
}

}  // namespace mbg::harness
