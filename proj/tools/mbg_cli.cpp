// Command-line entry points for the bandit-game benchmark: experiment runs,
// reference Nash solving, the single-agent regret suite, mean +/- std tables
// over parameter grids, and dataset inspection.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mbg/mbg.hpp"

namespace {

using namespace mbg;
using harness::Algorithm;
using harness::ExperimentConfig;
using harness::GameSpec;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GameFlags {
  std::string game;
  int n_players = 10;
  double a = 10.0;
  double b = 0.05;
  int resources = 2;
  double d_bar = 0.5;
  std::string data_path;
  double mu = 0.001;
  std::uint64_t seed = 42;
  std::vector<double> costs;       // cournot: overrides the seeded draws
  std::vector<double> capacities;  // cournot: overrides B_i = 1
};

void add_game_flags(CLI::App* cmd, GameFlags& flags) {
  cmd->add_option("--game", flags.game, "Game family: cournot|kelly|logistic")
      ->check(CLI::IsMember({"cournot", "kelly", "logistic"}))
      ->required();
  cmd->add_option("--N", flags.n_players, "Number of players")
      ->capture_default_str();
  cmd->add_option("--a", flags.a, "Cournot price intercept")
      ->capture_default_str();
  cmd->add_option("--b", flags.b, "Cournot price slope (monotonicity modulus)")
      ->capture_default_str();
  cmd->add_option("--S", flags.resources, "Kelly resource count")
      ->capture_default_str();
  cmd->add_option("--dbar", flags.d_bar, "Kelly entry-barrier upper bound")
      ->capture_default_str();
  cmd->add_option("--data", flags.data_path, "LIBSVM dataset path (logistic)");
  cmd->add_option("--mu", flags.mu, "Logistic regularization")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed,
                  "Seed for instance generation and trials")
      ->envname("MBG_SEED")
      ->capture_default_str();
  cmd->add_option("--costs", flags.costs,
                  "Cournot costs c_i (default: seeded U[0,1] draws)")
      ->delimiter(',');
  cmd->add_option("--capacities", flags.capacities,
                  "Cournot capacities B_i (default: all 1)")
      ->delimiter(',');
}

GameSpec build_spec(const GameFlags& flags) {
  if (flags.game == "cournot") {
    if (flags.n_players < 1) throw ParamError("--N must be >= 1");
    games::CournotParams p =
        games::random_cournot(flags.n_players, flags.a, flags.b, flags.seed);
    if (!flags.costs.empty()) {
      if (static_cast<int>(flags.costs.size()) != flags.n_players)
        throw ParamError("--costs needs exactly N values");
      p.costs = Eigen::Map<const Eigen::VectorXd>(flags.costs.data(),
                                                  flags.costs.size());
    }
    if (!flags.capacities.empty()) {
      if (static_cast<int>(flags.capacities.size()) != flags.n_players)
        throw ParamError("--capacities needs exactly N values");
      p.capacities = Eigen::Map<const Eigen::VectorXd>(flags.capacities.data(),
                                                       flags.capacities.size());
    }
    return p;
  }
  if (flags.game == "kelly") {
    if (flags.n_players < 1 || flags.resources < 1)
      throw ParamError("--N and --S must be >= 1");
    return games::random_kelly(flags.n_players, flags.resources, flags.d_bar,
                               flags.seed);
  }
  if (flags.data_path.empty())
    throw ParamError("logistic game needs --data <libsvm file>");
  auto data = std::make_shared<games::Dataset>(games::load_libsvm(flags.data_path));
  return games::LogisticGameParams{data, flags.mu};
}

std::string default_json_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

int cmd_run(const GameFlags& flags, const std::string& algo, long horizon,
            int trials, double noise, int workers, const std::string& out,
            const std::string& summary) {
  ExperimentConfig cfg;
  cfg.game = build_spec(flags);
  cfg.algo = algo == "fkm" ? Algorithm::Fkm : Algorithm::Barrier;
  cfg.horizon = horizon;
  cfg.trials = trials;
  cfg.seed = flags.seed;
  cfg.noise_sigma = noise;
  cfg.workers = workers;
  cfg.csv_path = out;
  cfg.json_path = summary.empty() ? default_json_path(out) : summary;
  const auto result = harness::run_experiment(cfg);
  std::cerr << "final dist_sq " << result.summary.final_mean << " +/- "
            << result.summary.final_std << " over " << trials << " trials ("
            << result.summary.runtime_seconds << " s)\n";
  std::cout << harness::summary_json(cfg, result).dump(2) << '\n';
  return kExitOk;
}

int cmd_solve_ne(const GameFlags& flags, double tol) {
  if (!(tol > 0)) throw ParamError("--tol must be > 0");
  const GameSpec spec = build_spec(flags);
  const games::Game game = harness::build_game(spec);
  equilibrium::NeSolution sol;
  if (flags.game == "cournot")
    sol = equilibrium::solve_ne_cournot(std::get<games::CournotParams>(spec));
  else if (flags.game == "kelly")
    sol = equilibrium::solve_ne_vi(game, tol);
  else
    sol = equilibrium::solve_ne_logistic(
        std::get<games::LogisticGameParams>(spec));
  nlohmann::json j;
  j["x_star"] = std::vector<double>(sol.x_star.data(),
                                    sol.x_star.data() + sol.x_star.size());
  j["residual"] = sol.residual;
  j["solver"] = sol.solver;
  j["iterations"] = sol.iterations;
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_regret(const std::vector<long>& horizons, int trials,
               std::uint64_t seed, double beta, int dim,
               const std::string& out) {
  harness::RegretConfig cfg;
  cfg.box_lower = Eigen::VectorXd::Zero(dim);
  cfg.box_upper = Eigen::VectorXd::Ones(dim);
  cfg.beta = beta;
  cfg.horizons = horizons;
  cfg.trials = trials;
  cfg.seed = seed;
  const auto records = harness::run_regret_experiment(cfg);

  if (!out.empty()) {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw ParamError("cannot open '" + out + "'");
    os << "horizon,trial,cum_realized,best_fixed_payoff,regret\n";
    for (const auto& r : records)
      os << r.t << ',' << r.trial << ',' << harness::format_double(r.cum_realized)
         << ',' << harness::format_double(r.best_fixed_payoff) << ','
         << harness::format_double(r.regret) << '\n';
  }

  nlohmann::json j;
  for (long h : horizons) {
    double mean = 0;
    int count = 0;
    for (const auto& r : records)
      if (r.t == h) {
        mean += r.regret;
        ++count;
      }
    j["mean_regret"][std::to_string(h)] = mean / std::max(count, 1);
  }
  try {
    j["slope"] = harness::fit_regret_slope(records);
  } catch (const InsufficientDataError&) {
    j["slope"] = nullptr;
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_table(const GameFlags& flags, long horizon, int trials, int workers,
              const std::string& cells_arg, const std::string& out) {
  if (flags.game == "logistic")
    throw ParamError("table supports cournot and kelly grids");

  // Cells are semicolon-separated parameter tuples; default is the full grid.
  std::vector<std::vector<double>> cells;
  if (!cells_arg.empty()) {
    std::istringstream is(cells_arg);
    std::string tok;
    while (std::getline(is, tok, ';')) {
      std::vector<double> tuple;
      std::istringstream ts(tok);
      std::string num;
      while (std::getline(ts, num, ',')) tuple.push_back(std::stod(num));
      if (tuple.size() != 3)
        throw ParamError("each cell needs three comma-separated values");
      cells.push_back(tuple);
    }
  } else {
    for (int n : {10, 20, 50, 100}) {
      if (flags.game == "cournot") {
        for (double a : {10.0, 20.0})
          for (double b : {0.05, 0.10}) cells.push_back({double(n), a, b});
      } else {
        for (int s : {2, 5})
          for (double dbar : {0.5, 1.0}) cells.push_back({double(n), double(s), dbar});
      }
    }
  }

  std::vector<harness::TableCell> table_cells;
  for (const auto& cell : cells) {
    GameFlags cf = flags;
    cf.n_players = static_cast<int>(cell[0]);
    if (flags.game == "cournot") {
      cf.a = cell[1];
      cf.b = cell[2];
    } else {
      cf.resources = static_cast<int>(cell[1]);
      cf.d_bar = cell[2];
    }
    std::ostringstream key;
    key << '(' << cell[0] << ", " << cell[1] << ", " << cell[2] << ')';
    for (const std::string algo : {"fkm", "barrier"}) {
      ExperimentConfig cfg;
      cfg.game = build_spec(cf);
      cfg.algo = algo == "fkm" ? Algorithm::Fkm : Algorithm::Barrier;
      cfg.horizon = horizon;
      cfg.trials = trials;
      cfg.seed = flags.seed;
      cfg.workers = workers;
      std::cerr << "table cell " << key.str() << " " << algo << "...\n";
      const auto result = harness::run_experiment(cfg);
      harness::TableCell tc;
      tc.key = key.str();
      tc.algorithm = algo;
      tc.horizon = horizon;
      tc.trials = trials;
      for (int trial = 0; trial < trials; ++trial)
        for (const auto& r : result.records)
          if (r.trial == trial && r.t == horizon)
            tc.final_dists.push_back(r.dist_sq_played);
      table_cells.push_back(std::move(tc));
    }
  }

  const harness::Table table = harness::aggregate_table(table_cells);
  std::cout << table.to_text();
  if (!out.empty()) {
    std::ofstream text(out + ".txt", std::ios::binary);
    std::ofstream csv(out + ".csv", std::ios::binary);
    if (!text || !csv) throw ParamError("cannot open table outputs at '" + out + "'");
    text << table.to_text();
    csv << table.to_csv();
  }
  return kExitOk;
}

int cmd_inspect_data(const std::string& path, int configured_dim) {
  games::LibsvmOptions opt;
  opt.configured_dim = configured_dim;
  const games::Dataset data = games::load_libsvm(path, opt);
  nlohmann::json j;
  j["m"] = data.m();
  j["n"] = data.n();
  j["positives"] = data.positives();
  j["negatives"] = data.negatives();
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit learning in strongly monotone games: benchmark harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags override it");

  GameFlags run_flags;
  std::string run_algo = "barrier";
  long run_T = 100000;
  int run_trials = 10;
  double run_noise = 0.0;
  int run_workers = 1;
  std::string run_out, run_summary;
  auto* run = app.add_subcommand("run", "Run a multi-trial experiment");
  add_game_flags(run, run_flags);
  run->add_option("--algo", run_algo, "Algorithm: barrier|fkm")
      ->check(CLI::IsMember({"barrier", "fkm"}))
      ->capture_default_str();
  run->add_option("--T", run_T, "Horizon (rounds)")->capture_default_str();
  run->add_option("--trials", run_trials, "Independent trials")
      ->capture_default_str();
  run->add_option("--noise", run_noise, "Uniform payoff-noise bound sigma")
      ->capture_default_str();
  run->add_option("--workers", run_workers, "Parallel trial workers")
      ->capture_default_str();
  run->add_option("--out", run_out, "Trajectory CSV path")->required();
  run->add_option("--summary", run_summary,
                  "Summary JSON path (default: out with .json)");

  GameFlags ne_flags;
  double ne_tol = 1e-10;
  auto* ne = app.add_subcommand("solve-ne", "Solve the reference Nash equilibrium");
  add_game_flags(ne, ne_flags);
  ne->add_option("--tol", ne_tol, "Residual tolerance")->capture_default_str();

  std::vector<long> regret_horizons = {100, 1000, 10000, 100000};
  int regret_trials = 10;
  std::uint64_t regret_seed = 42;
  double regret_beta = 1.0;
  int regret_dim = 2;
  std::string regret_out;
  auto* regret =
      app.add_subcommand("regret", "Single-agent regret suite on a box");
  regret->add_option("--horizons", regret_horizons, "Horizon grid")
      ->delimiter(',')
      ->capture_default_str();
  regret->add_option("--trials", regret_trials, "Trials per horizon")
      ->capture_default_str();
  regret->add_option("--seed", regret_seed, "Seed")
      ->envname("MBG_SEED")
      ->capture_default_str();
  regret->add_option("--beta", regret_beta, "Strong concavity of the adversary")
      ->capture_default_str();
  regret->add_option("--dim", regret_dim, "Box dimension")->capture_default_str();
  regret->add_option("--out", regret_out, "Per-trial regret CSV path");

  GameFlags table_flags;
  long table_T = 10000;
  int table_trials = 10;
  int table_workers = 1;
  std::string table_cells, table_out;
  auto* table =
      app.add_subcommand("table", "Mean +/- std table over a parameter grid");
  add_game_flags(table, table_flags);
  table->add_option("--T", table_T, "Horizon (rounds)")->capture_default_str();
  table->add_option("--trials", table_trials, "Trials per cell")
      ->capture_default_str();
  table->add_option("--workers", table_workers, "Parallel trial workers")
      ->capture_default_str();
  table->add_option("--cells", table_cells,
                    "Semicolon-separated tuples, e.g. '10,10,0.05;20,20,0.1' "
                    "(default: the full grid)");
  table->add_option("--out", table_out, "Output prefix (.txt and .csv)");

  std::string inspect_path;
  int inspect_dim = 0;
  auto* inspect = app.add_subcommand("inspect-data", "LIBSVM dataset statistics");
  inspect->add_option("--data", inspect_path, "Dataset path")->required();
  inspect->add_option("--n", inspect_dim, "Expected feature dimension")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run)
      return cmd_run(run_flags, run_algo, run_T, run_trials, run_noise,
                     run_workers, run_out, run_summary);
    if (*ne) return cmd_solve_ne(ne_flags, ne_tol);
    if (*regret)
      return cmd_regret(regret_horizons, regret_trials, regret_seed, regret_beta,
                        regret_dim, regret_out);
    if (*table)
      return cmd_table(table_flags, table_T, table_trials, table_workers,
                       table_cells, table_out);
    if (*inspect) return cmd_inspect_data(inspect_path, inspect_dim);
  } catch (const ParamError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
