#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <random>

#include "mbg/games/game.hpp"
#include "mbg/games/libsvm.hpp"
#include "mbg/sampling/rng.hpp"

namespace mbg::games {

// ---------------------------------------------------------------------------
// Cournot competition: firm i supplies x_i in [0, B_i], price a - b*sum(x),
//   u_i(x) = x_i (a - b sum_j x_j) - c_i x_i.
// Strongly monotone with modulus b under unit weights.
// ---------------------------------------------------------------------------
struct CournotParams {
  int num_players = 0;
  double a = 0;
  double b = 0;
  Vec capacities;  // B_i
  Vec costs;       // c_i
};

inline Game cournot_build(const CournotParams& p) {
  if (p.num_players < 1) throw ParamError("cournot: need at least one player");
  if (!(p.a > 0) || !(p.b > 0)) throw ParamError("cournot: a, b must be > 0");
  if (p.capacities.size() != p.num_players || p.costs.size() != p.num_players)
    throw ParamError("cournot: capacity/cost vectors must have N entries");
  if ((p.capacities.array() <= 0).any())
    throw ParamError("cournot: capacities must be > 0");
  if ((p.costs.array() < 0).any())
    throw ParamError("cournot: costs must be >= 0");

  const int n = p.num_players;
  Game g;
  g.family = "cournot";
  g.set_dims(std::vector<int>(n, 1));
  g.domains.reserve(n);
  for (int i = 0; i < n; ++i)
    g.domains.push_back(Barrier::box(Vec::Zero(1), p.capacities.segment(i, 1)));

  const double a = p.a, b = p.b;
  const Vec c = p.costs;
  g.payoffs = [n, a, b, c](const Vec& x) {
    const double total = x.sum();
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = x[i] * (a - b * total) - c[i] * x[i];
    return u;
  };
  g.gradients = [n, a, b, c](const Vec& x) {
    const double total = x.sum();
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = a - c[i] - b * total - b * x[i];
    return v;
  };
  g.beta = b;
  g.lambdas = Vec::Ones(n);
  g.lipschitz = Vec::Constant(n, b * std::sqrt(n + 3.0));
  g.payoff_bound = a * p.capacities.sum() +
                   (p.costs.array() * p.capacities.array()).maxCoeff();
  return g;
}

// Seeded random instance: B_i = 1, c_i ~ U[0,1].
inline CournotParams random_cournot(int num_players, double a, double b,
                                    std::uint64_t seed) {
  CournotParams p;
  p.num_players = num_players;
  p.a = a;
  p.b = b;
  p.capacities = Vec::Ones(num_players);
  p.costs = Vec(num_players);
  sampling::RngStream rng(seed, /*trial=*/0, /*player=*/0x636f7572);  // params stream
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < num_players; ++i) p.costs[i] = u01(rng);
  return p;
}

// ---------------------------------------------------------------------------
// Kelly auction: player i bids x_is >= 0 per resource s with sum_s x_is <= B_i,
//   u_i(x) = sum_s g_i q_s x_is / (d_s + sum_j x_js) - sum_s x_is.
// Strongly monotone with weights 1/g_i and modulus
//   min_s(q_s d_s) / (sum_s d_s + sum_i B_i)^3.
// ---------------------------------------------------------------------------
struct KellyParams {
  int num_players = 0;
  int num_resources = 0;
  Vec gains;       // g_i
  Vec capacities;  // q_s
  Vec entry;       // d_s
  Vec budgets;     // B_i
};

inline Game kelly_build(const KellyParams& p) {
  const int n = p.num_players, s_count = p.num_resources;
  if (n < 1 || s_count < 1) throw ParamError("kelly: need N >= 1 and S >= 1");
  if (p.gains.size() != n || p.budgets.size() != n)
    throw ParamError("kelly: gains/budgets must have N entries");
  if (p.capacities.size() != s_count || p.entry.size() != s_count)
    throw ParamError("kelly: capacities/entry must have S entries");
  if ((p.entry.array() <= 0).any())
    throw ParamError("kelly: entry barriers d_s must be > 0");
  if ((p.gains.array() <= 0).any() || (p.capacities.array() <= 0).any() ||
      (p.budgets.array() <= 0).any())
    throw ParamError("kelly: gains, capacities, budgets must be > 0");

  Game g;
  g.family = "kelly";
  g.set_dims(std::vector<int>(n, s_count));
  g.domains.reserve(n);
  for (int i = 0; i < n; ++i)
    g.domains.push_back(Barrier::budget_simplex(s_count, p.budgets[i]));

  const Vec gain = p.gains, q = p.capacities, d = p.entry;
  g.payoffs = [n, s_count, gain, q, d](const Vec& x) {
    Vec totals = Vec::Zero(s_count);
    for (int i = 0; i < n; ++i) totals += x.segment(i * s_count, s_count);
    Vec u(n);
    for (int i = 0; i < n; ++i) {
      double acc = 0;
      for (int s = 0; s < s_count; ++s) {
        const double xis = x[i * s_count + s];
        acc += gain[i] * q[s] * xis / (d[s] + totals[s]) - xis;
      }
      u[i] = acc;
    }
    return u;
  };
  g.gradients = [n, s_count, gain, q, d](const Vec& x) {
    Vec totals = Vec::Zero(s_count);
    for (int i = 0; i < n; ++i) totals += x.segment(i * s_count, s_count);
    Vec v(n * s_count);
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < s_count; ++s) {
        const double denom = d[s] + totals[s];
        const double others = denom - x[i * s_count + s];
        v[i * s_count + s] = gain[i] * q[s] * others / (denom * denom) - 1.0;
      }
    return v;
  };

  const double envelope = d.sum() + p.budgets.sum();
  g.beta = (q.array() * d.array()).minCoeff() / (envelope * envelope * envelope);
  g.lambdas = gain.array().inverse().matrix();
  g.payoff_bound = (gain.array() * q.sum()).maxCoeff() + p.budgets.maxCoeff();

  // Per-player Lipschitz bound on v_i, estimated by sampled difference
  // quotients with a 1.5 safety factor.
  sampling::RngStream rng(0x6b656c6c, 0, 0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto random_profile = [&]() {
    Vec x(n * s_count);
    for (int i = 0; i < n; ++i) {
      Vec raw(s_count);
      for (int s = 0; s < s_count; ++s) raw[s] = u01(rng);
      const double scale = u01(rng) * p.budgets[i] / std::max(raw.sum(), 1e-9);
      x.segment(i * s_count, s_count) = raw * std::min(1.0, scale);
    }
    return x;
  };
  Vec ell = Vec::Zero(n);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec x1 = random_profile(), x2 = random_profile();
    const double dist = (x1 - x2).norm();
    if (dist < 1e-12) continue;
    const Vec v1 = g.gradients(x1), v2 = g.gradients(x2);
    for (int i = 0; i < n; ++i) {
      const double dv =
          (v1.segment(i * s_count, s_count) - v2.segment(i * s_count, s_count))
              .norm();
      ell[i] = std::max(ell[i], dv / dist);
    }
  }
  g.lipschitz = 1.5 * ell;
  return g;
}

// Seeded random instance: B_i = 1, g_i ~ U[0,1], q_s ~ U[0,1], d_s ~ U[0,dbar];
// draws below 1e-6 are rejected to keep gradients and the modulus bounded.
inline KellyParams random_kelly(int num_players, int num_resources, double d_bar,
                                std::uint64_t seed) {
  KellyParams p;
  p.num_players = num_players;
  p.num_resources = num_resources;
  p.budgets = Vec::Ones(num_players);
  sampling::RngStream rng(seed, /*trial=*/0, /*player=*/0x6b656c6c);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto draw = [&](double scale) {
    double v = 0;
    do {
      v = scale * u01(rng);
    } while (v < 1e-6);
    return v;
  };
  p.gains = Vec(num_players);
  for (int i = 0; i < num_players; ++i) p.gains[i] = draw(1.0);
  p.capacities = Vec(num_resources);
  p.entry = Vec(num_resources);
  for (int s = 0; s < num_resources; ++s) p.capacities[s] = draw(1.0);
  for (int s = 0; s < num_resources; ++s) p.entry[s] = draw(d_bar);
  return p;
}

// ---------------------------------------------------------------------------
// Distributed l2-regularized logistic regression as a potential game: player i
// owns coordinate i of x, every player's payoff is -f(x) with
//   f(x) = (1/m) sum_j log(1 + exp(-b_j a_j' x)) + mu ||x||^2.
// The potential -f is 2mu-strongly concave, so the game is strongly monotone
// with modulus 2mu under unit weights.
// ---------------------------------------------------------------------------
struct LogisticGameParams {
  std::shared_ptr<Dataset> dataset;
  double mu = 0;
};

inline double logistic_smoothness(const Dataset& data) {
  double max_sq = 0;
  for (int j = 0; j < data.m(); ++j)
    max_sq = std::max(max_sq, data.features.row(j).squaredNorm());
  return 0.25 * max_sq;
}

inline double logistic_objective(const Dataset& data, double mu, const Vec& x) {
  const Vec margins =
      (data.features * x).cwiseProduct(data.labels);  // b_j a_j' x
  double loss = 0;
  for (int j = 0; j < margins.size(); ++j) {
    const double t = -margins[j];
    loss += t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  return loss / data.m() + mu * x.squaredNorm();
}

inline Vec logistic_gradient(const Dataset& data, double mu, const Vec& x) {
  const Vec margins = (data.features * x).cwiseProduct(data.labels);
  Vec coef(margins.size());
  for (int j = 0; j < margins.size(); ++j) {
    const double t = -margins[j];
    const double sig = t > 0 ? 1.0 / (1.0 + std::exp(-t))
                             : std::exp(t) / (1.0 + std::exp(t));
    coef[j] = -data.labels[j] * sig / data.m();
  }
  return data.features.transpose() * coef + 2.0 * mu * x;
}

inline Game logistic_build(const LogisticGameParams& p) {
  if (!p.dataset || p.dataset->m() == 0)
    throw ParamError("logistic game: dataset is empty");
  if (!(p.mu > 0)) throw ParamError("logistic game: mu must be > 0");
  for (int j = 0; j < p.dataset->m(); ++j) {
    const double b = p.dataset->labels[j];
    if (b != 1.0 && b != -1.0)
      throw ParamError("logistic game: labels must be +1 or -1");
  }

  const int n = p.dataset->n();
  Game g;
  g.family = "logistic";
  g.set_dims(std::vector<int>(n, 1));
  g.domains.reserve(n);
  for (int i = 0; i < n; ++i) g.domains.push_back(Barrier::zero(1));

  auto data = p.dataset;
  const double mu = p.mu;
  g.payoffs = [data, mu, n](const Vec& x) {
    return Vec::Constant(n, -logistic_objective(*data, mu, x));
  };
  g.gradients = [data, mu](const Vec& x) {
    return (-logistic_gradient(*data, mu, x)).eval();
  };
  g.beta = 2.0 * mu;
  g.lambdas = Vec::Ones(n);
  const double ell = logistic_smoothness(*data);
  g.lipschitz = Vec::Constant(n, ell + 2.0 * mu);
  // Crude sup of |f| over the region the run visits: iterates start at the
  // origin and f decreases along the trajectory, so f(0) plus slack is a
  // serviceable bound.
  g.payoff_bound = logistic_objective(*data, mu, Vec::Zero(n)) + 1.0;
  return g;
}

}  // namespace mbg::games
