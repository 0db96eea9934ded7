#pragma once

// Umbrella header: bandit learning in smooth strongly monotone games with
// self-concordant barrier scalings, plus the spherical-SPSA baseline, three
// benchmark game families, reference equilibrium solvers and the experiment
// harness.

#include "mbg/errors.hpp"
#include "mbg/geometry/barrier.hpp"
#include "mbg/geometry/prox.hpp"
#include "mbg/geometry/scaling.hpp"
#include "mbg/sampling/rng.hpp"
#include "mbg/sampling/estimators.hpp"
#include "mbg/sampling/spsa.hpp"
#include "mbg/games/game.hpp"
#include "mbg/games/libsvm.hpp"
#include "mbg/games/families.hpp"
#include "mbg/equilibrium/projection.hpp"
#include "mbg/equilibrium/solvers.hpp"
#include "mbg/learners/learners.hpp"
#include "mbg/harness/records.hpp"
#include "mbg/harness/experiment.hpp"
#include "mbg/harness/regret.hpp"
