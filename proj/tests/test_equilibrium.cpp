#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mbg/equilibrium/projection.hpp"
#include "mbg/equilibrium/solvers.hpp"
#include "mbg/games/families.hpp"
#include "test_support.hpp"

using namespace mbg;
using namespace mbg::equilibrium;
using games::Game;
using geometry::Barrier;
using geometry::Vec;
using sampling::RngStream;
using test_support::random_interior;

TEST_CASE("projection closed forms") {
  CHECK(project_box(Vec::Zero(1), Vec::Ones(1), Vec::Constant(1, -0.2))[0] == 0.0);
  CHECK(project_box(Vec::Zero(1), Vec::Ones(1), Vec::Constant(1, 1.7))[0] == 1.0);

  const Vec p = project_budget_simplex(1.0, Vec::Constant(2, 0.8));
  CHECK(p[0] == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(p[1] == Catch::Approx(0.5).epsilon(1e-14));

  const Vec b = project_ball(1.0, (Vec(2) << 2.0, 0.0).finished());
  CHECK(b[0] == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(b[1] == 0.0);
}

TEST_CASE("budget simplex projection satisfies the KKT conditions") {
  RngStream rng(41);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 2000; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const double budget = 0.5 + (rng() % 100) / 50.0;
    Vec y(n);
    for (int k = 0; k < n; ++k) y[k] = 2.0 * gauss(rng);
    const Vec x = project_budget_simplex(budget, y);
    REQUIRE((x.array() >= -1e-12).all());
    REQUIRE(x.sum() <= budget + 1e-9);
    // Optimality: <y - x, z - x> <= 0 for feasible z, sampled.
    for (int probe = 0; probe < 10; ++probe) {
      Vec z(n);
      for (int k = 0; k < n; ++k) z[k] = std::abs(gauss(rng));
      z *= (rng() % 1000) / 1000.0 * budget / std::max(z.sum(), 1e-12);
      REQUIRE((y - x).dot(z - x) <= 1e-9);
    }
  }
}

TEST_CASE("projections are idempotent and nonexpansive") {
  RngStream rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::vector<Barrier> domains = {Barrier::box(3, -1.0, 2.0),
                                        Barrier::budget_simplex(4, 1.5),
                                        Barrier::ball(3, 0.8)};
  for (const auto& dom : domains) {
    for (int rep = 0; rep < 2000; ++rep) {
      Vec y(dom.dim()), z(dom.dim());
      for (int k = 0; k < dom.dim(); ++k) {
        y[k] = 3.0 * gauss(rng);
        z[k] = 3.0 * gauss(rng);
      }
      const Vec py = project(dom, y), pz = project(dom, z);
      REQUIRE(dom.is_feasible(py, 1e-9));
      REQUIRE((project(dom, py) - py).norm() <= 1e-12);
      REQUIRE((py - pz).norm() <= (y - z).norm() + 1e-12);
    }
  }
}

TEST_CASE("cournot equilibrium: symmetric interior case") {
  games::CournotParams p;
  p.num_players = 2;
  p.a = 2.0;
  p.b = 1.0;
  p.capacities = Vec::Constant(2, 10.0);
  p.costs = Vec::Constant(2, 0.5);
  const NeSolution sol = solve_ne_cournot(p);
  // First-order conditions give x_i = (a - c)/(b (N+1)).
  CHECK(sol.x_star[0] == Catch::Approx(0.5).margin(1e-8));
  CHECK(sol.x_star[1] == Catch::Approx(0.5).margin(1e-8));
  CHECK(sol.residual <= 1e-9);
}

TEST_CASE("cournot equilibrium: capacity-saturated regime") {
  // v_i(1,...,1) = 10 - c_i - 0.5 - 0.05 > 0 for c_i <= 1, so the corner is
  // the equilibrium.
  const games::CournotParams p = games::random_cournot(10, 10.0, 0.05, 4242);
  const NeSolution sol = solve_ne_cournot(p);
  REQUIRE((sol.x_star - Vec::Ones(10)).norm() <= 1e-8);
}

TEST_CASE("cournot equilibrium satisfies the variational characterization") {
  const games::CournotParams p = games::random_cournot(6, 8.0, 0.4, 11);
  const Game game = games::cournot_build(p);
  const NeSolution sol = solve_ne_cournot(p);
  const Vec v_star = game.gradients(sol.x_star);
  RngStream rng(43);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    for (int i = 0; i < game.num_players; ++i) {
      const double xi = u01(rng) * p.capacities[i];
      REQUIRE((xi - sol.x_star[i]) * v_star[i] <= 1e-8);
    }
  }
}

TEST_CASE("extragradient agrees with the cournot solver") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const games::CournotParams p = games::random_cournot(5, 6.0, 0.3, seed);
    const Game game = games::cournot_build(p);
    const NeSolution direct = solve_ne_cournot(p);
    const NeSolution vi = solve_ne_vi(game, 1e-10);
    REQUIRE((direct.x_star - vi.x_star).norm() <= 1e-7);
    REQUIRE(vi.residual <= 1e-10);
  }
}

TEST_CASE("single-player kelly has the closed-form stationary point") {
  games::KellyParams p;
  p.num_players = 1;
  p.num_resources = 1;
  p.gains = Vec::Constant(1, 2.0);
  p.capacities = Vec::Constant(1, 1.5);
  p.entry = Vec::Constant(1, 0.4);
  p.budgets = Vec::Constant(1, 1.0);
  const Game game = games::kelly_build(p);
  const NeSolution sol = solve_ne_vi(game, 1e-11);
  const double g = p.gains[0], q = p.capacities[0], d = p.entry[0];
  const double closed =
      std::clamp(std::sqrt(g * q * d) - d, 0.0, p.budgets[0]);
  REQUIRE(sol.x_star[0] == Catch::Approx(closed).margin(1e-8));
}

TEST_CASE("kelly equilibrium is unique across starting points") {
  const games::KellyParams p = games::random_kelly(4, 2, 0.5, 17);
  const Game game = games::kelly_build(p);
  const NeSolution from_center = solve_ne_vi(game, 1e-10);

  Vec alt_start(game.total_dim);
  RngStream rng(44);
  for (int i = 0; i < game.num_players; ++i)
    alt_start.segment(game.offsets[i], game.dims[i]) =
        random_interior(game.domains[i], rng, 0.3);
  const NeSolution from_random = solve_ne_vi(game, 1e-10, &alt_start);
  REQUIRE((from_center.x_star - from_random.x_star).norm() <= 1e-7);

  // Sampled variational characterization.
  const Vec v_star = game.gradients(from_center.x_star);
  for (int rep = 0; rep < 1000; ++rep) {
    for (int i = 0; i < game.num_players; ++i) {
      const Vec xi = random_interior(game.domains[i], rng, 0.01);
      const auto xs = from_center.x_star.segment(game.offsets[i], game.dims[i]);
      const auto vs = v_star.segment(game.offsets[i], game.dims[i]);
      REQUIRE((xi - xs).dot(vs) <= 1e-8);
    }
  }
}

TEST_CASE("logistic minimizer matches a one-dimensional bisection oracle") {
  auto data = std::make_shared<games::Dataset>();
  data->features = Eigen::MatrixXd::Zero(1, 3);
  data->features(0, 0) = 1.0;  // a = e_1
  data->labels = Vec::Constant(1, 1.0);
  const double mu = 0.5;
  const NeSolution sol = solve_ne_logistic({data, mu});

  // Stationarity in coordinate 1: -sigma(-x) + 2 mu x = 0.
  auto stat = [&](double x) {
    return -1.0 / (1.0 + std::exp(x)) + 2.0 * mu * x;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stat(mid) > 0 ? hi : lo) = mid;
  }
  REQUIRE(sol.x_star[0] == Catch::Approx(0.5 * (lo + hi)).margin(1e-8));
  REQUIRE(sol.x_star.segment(1, 2).norm() <= 1e-9);
  REQUIRE(sol.residual <= 1e-10);
}

TEST_CASE("heavy regularization pins the logistic minimizer near zero") {
  auto data = std::make_shared<games::Dataset>();
  RngStream rng(45);
  std::normal_distribution<double> gauss(0.0, 1.0);
  data->features = Eigen::MatrixXd(10, 4);
  data->labels = Vec(10);
  for (int j = 0; j < 10; ++j) {
    for (int k = 0; k < 4; ++k) data->features(j, k) = gauss(rng);
    data->labels[j] = gauss(rng) > 0 ? 1.0 : -1.0;
  }
  const double mu = 1e6;
  const NeSolution sol = solve_ne_logistic({data, mu});
  const double g0 = games::logistic_gradient(*data, mu, Vec::Zero(4)).norm();
  REQUIRE(sol.x_star.norm() <= g0 / (2.0 * mu) + 1e-12);
}
