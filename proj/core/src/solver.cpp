#include "rpsobs/solver.hpp"

#include <algorithm>
#include <cmath>

namespace rpsobs {

void SolverConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw PreconditionError("solver alpha must lie in (0, 1)");
  }
  if (!(tol > 0.0)) throw PreconditionError("solver tol must be > 0");
  if (max_iters < 1) throw PreconditionError("solver max_iters must be >= 1");
}

namespace {

MoveDist initial(const StrategySpec& spec) {
  return spec.is_reactive() ? MoveDist::uniform() : *spec.dist;
}

MoveDist damped(const StrategySpec& spec, const MoveDist& self,
                const MoveDist& opp, double alpha) {
  const MoveDist target = reactive_update_map(*spec.rule, opp);
  MoveDist next;
  for (int i = 0; i < 3; ++i) {
    next.p[i] = alpha * target.p[i] + (1.0 - alpha) * self.p[i];
  }
  return next;
}

}  // namespace

SteadyState steady_state(const StrategyPair& pair, const SolverConfig& cfg) {
  cfg.validate();
  const StrategySpec& spec1 = get_strategy(pair.p1);
  const StrategySpec& spec2 = get_strategy(pair.p2);

  SteadyState st;
  st.s1 = initial(spec1);
  st.s2 = initial(spec2);
  if (!spec1.is_reactive() && !spec2.is_reactive()) {
    st.converged = true;
    return st;
  }

  for (int it = 0; it < cfg.max_iters; ++it) {
    const MoveDist n1 =
        spec1.is_reactive() ? damped(spec1, st.s1, st.s2, cfg.alpha) : st.s1;
    const MoveDist n2 =
        spec2.is_reactive() ? damped(spec2, st.s2, st.s1, cfg.alpha) : st.s2;
    st.residual = std::max(l1_distance(n1, st.s1), l1_distance(n2, st.s2));
    st.s1 = n1;
    st.s2 = n2;
    st.iterations = it + 1;
    if (st.residual < cfg.tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

OutcomeDist outcome_distribution(const MoveDist& s1, const MoveDist& s2) {
  s1.validate("player 1 strategy");
  s2.validate("player 2 strategy");
  OutcomeDist out;
  for (Move m : kAllMoves) {
    out.win += s1[m] * s2[loses_to(m)];
    out.draw += s1[m] * s2[m];
    out.loss += s1[m] * s2[beats(m)];
  }
  return out;
}

GroundTruth ground_truth(const StrategyPair& pair, const SolverConfig& cfg) {
  GroundTruth gt;
  gt.state = steady_state(pair, cfg);
  gt.dist = outcome_distribution(gt.state.s1, gt.state.s2);
  return gt;
}

}  // namespace rpsobs
