#pragma once

#include <Eigen/Dense>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "mbg/errors.hpp"
#include "mbg/geometry/barrier.hpp"

namespace mbg::games {

using geometry::Barrier;
using geometry::Mat;
using geometry::Vec;

// N-player smooth game over a product of per-player feasible sets. Joint
// profiles are stacked into one vector in player order; payoffs and
// individual payoff gradients are evaluated for all players in one pass.
// Immutable after construction, evaluation is pure.
struct Game {
  std::string family;
  int num_players = 0;
  std::vector<int> dims;     // n_i
  std::vector<int> offsets;  // start of player i's block
  int total_dim = 0;
  std::vector<Barrier> domains;

  std::function<Vec(const Vec&)> payoffs;    // length N: u_i(x)
  std::function<Vec(const Vec&)> gradients;  // stacked v_i(x) = grad_i u_i(x)

  double beta = 0;      // strong-monotonicity modulus for the weights below
  Vec lambdas;          // certificate weights lambda_i
  Vec lipschitz;        // per-player Lipschitz bound on v_i
  double payoff_bound = 0;  // valid L with sup |u_i| <= L

  double payoff(int i, const Vec& x) const { return payoffs(x)[i]; }

  Vec gradient(int i, const Vec& x) const {
    return gradients(x).segment(offsets[i], dims[i]);
  }

  Vec::ConstSegmentReturnType player_block(const Vec& x, int i) const {
    return x.segment(offsets[i], dims[i]);
  }

  void set_dims(std::vector<int> player_dims) {
    dims = std::move(player_dims);
    num_players = static_cast<int>(dims.size());
    offsets.resize(dims.size());
    int off = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      offsets[i] = off;
      off += dims[i];
    }
    total_dim = off;
  }

  Vec stack(const std::vector<Vec>& per_player) const {
    Vec x(total_dim);
    for (int i = 0; i < num_players; ++i)
      x.segment(offsets[i], dims[i]) = per_player[i];
    return x;
  }

  std::vector<Vec> unstack(const Vec& x) const {
    std::vector<Vec> out(num_players);
    for (int i = 0; i < num_players; ++i)
      out[i] = x.segment(offsets[i], dims[i]);
    return out;
  }
};

}  // namespace mbg::games
