#pragma once

#include "rpsobs/catalog.hpp"
#include "rpsobs/types.hpp"

namespace rpsobs {

struct SolverConfig {
  double alpha = 0.5;      // damping, in (0, 1)
  double tol = 1e-4;       // L1 step threshold
  int max_iters = 10'000;

  void validate() const;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct SteadyState {
  MoveDist s1;
  MoveDist s2;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // largest adaptive-player L1 step of the last update
};

// Damped coupled fixed-point iteration from uniform play. Static and mixture
// players are pinned to their catalog distribution; reactive players update
//   s <- alpha * g(s_opponent) + (1 - alpha) * s
// simultaneously until every adaptive step is below tol or max_iters.
SteadyState steady_state(const StrategyPair& pair, const SolverConfig& cfg = {});

// Outcome law of independent draws from s1 and s2 (stationary mixing).
OutcomeDist outcome_distribution(const MoveDist& s1, const MoveDist& s2);

struct GroundTruth {
  OutcomeDist dist;
  SteadyState state;
  bool approximate() const { return !state.converged; }
};

// steady_state followed by outcome_distribution. Non-convergence is reported
// through approximate(), not thrown.
GroundTruth ground_truth(const StrategyPair& pair, const SolverConfig& cfg = {});

}  // namespace rpsobs
