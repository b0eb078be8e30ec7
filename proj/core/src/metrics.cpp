#include "rpsobs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rpsobs/engine.hpp"

namespace rpsobs {

double cross_entropy(const OutcomeDist& truth, const OutcomeDist& guess) {
  const auto t = truth.as_array();
  const auto g = guess.as_array();
  double ce = 0.0;
  for (int c = 0; c < 3; ++c) ce -= t[c] * std::log(g[c] + kCrossEntropyEpsilon);
  return ce;
}

double brier(const OutcomeDist& truth, const OutcomeDist& guess) {
  const auto t = truth.as_array();
  const auto g = guess.as_array();
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += (g[c] - t[c]) * (g[c] - t[c]);
  return s;
}

double expected_value(const OutcomeDist& p) { return p.win - p.loss; }

double ev_loss(const OutcomeDist& truth, const OutcomeDist& guess) {
  const double d = expected_value(truth) - expected_value(guess);
  return d * d;
}

const HeatmapCell& HeatmapGrid::cell(const StrategyPair& guess) const {
  for (const HeatmapCell& c : cells) {
    if (c.guess == guess) return c;
  }
  throw UnknownKeyError("pair " + guess.str() + " not in grid");
}

double HeatmapGrid::normalize_ce(double ce) const {
  if (degenerate()) return kDegenerateCeNorm;
  return std::clamp((ce - ce_min) / (ce_max - ce_min), 0.0, 1.0);
}

std::vector<std::pair<StrategyPair, OutcomeDist>> pair_outcomes(
    const SolverConfig& cfg) {
  std::vector<std::pair<StrategyPair, OutcomeDist>> out;
  out.reserve(kGridCells);
  for (const StrategySpec& a : catalog()) {
    for (const StrategySpec& b : catalog()) {
      const StrategyPair pair{a.key, b.key};
      out.emplace_back(pair, ground_truth(pair, cfg).dist);
    }
  }
  return out;
}

HeatmapGrid loss_grid(const OutcomeDist& truth, const SolverConfig& cfg,
                      const MetricOptions& opts) {
  const auto outcomes = pair_outcomes(cfg);
  return loss_grid(truth, outcomes, opts);
}

HeatmapGrid loss_grid(
    const OutcomeDist& truth,
    std::span<const std::pair<StrategyPair, OutcomeDist>> outcomes,
    const MetricOptions& opts) {
  truth.validate("ground truth");
  HeatmapGrid grid;
  grid.truth = truth;
  grid.options = opts;
  grid.cells.reserve(outcomes.size());
  for (const auto& [pair, dist] : outcomes) {
    HeatmapCell cell{pair, dist, {}};
    cell.losses.ce = cross_entropy(truth, dist);
    cell.losses.brier = brier(truth, dist);
    cell.losses.ev_loss = ev_loss(truth, dist);
    grid.cells.push_back(cell);
  }
  if (!grid.cells.empty()) {
    const auto [lo, hi] = std::minmax_element(
        grid.cells.begin(), grid.cells.end(),
        [](const HeatmapCell& x, const HeatmapCell& y) {
          return x.losses.ce < y.losses.ce;
        });
    grid.ce_min = lo->losses.ce;
    grid.ce_max = hi->losses.ce;
  }
  for (HeatmapCell& cell : grid.cells) {
    cell.losses = union_loss(truth, cell.dist, grid);
  }
  return grid;
}

LossBreakdown union_loss(const OutcomeDist& truth, const OutcomeDist& guess,
                         const HeatmapGrid& grid) {
  LossBreakdown l;
  l.ce = cross_entropy(truth, guess);
  l.brier = brier(truth, guess);
  l.ev_loss = ev_loss(truth, guess);
  l.ce_norm = grid.normalize_ce(l.ce);
  l.brier_norm = grid.options.brier_halved ? l.brier / 2.0 : l.brier;
  l.ev_norm = l.ev_loss / kEvLossMax;
  l.union_loss = (l.ce_norm + l.brier_norm + l.ev_norm) / 3.0;
  return l;
}

void GuessLog::append(GuessLogEntry entry) {
  if (!entries_.empty() && entry.round <= entries_.back().round) {
    throw PreconditionError("guess log rounds must be strictly increasing");
  }
  if (!(entry.confidence >= 0.0 && entry.confidence <= 1.0)) {
    throw PreconditionError("guess confidence must lie in [0, 1]");
  }
  entries_.push_back(entry);
}

double sir(const GuessLog& log, const StrategyPair& truth) {
  if (log.empty()) throw PreconditionError("SIR of an empty guess log");
  const auto hits = std::count_if(
      log.entries().begin(), log.entries().end(), [&](const GuessLogEntry& e) {
        return e.guess_s1 == truth.p1 && e.guess_s2 == truth.p2;
      });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(log.size());
}

double permutation_test(std::span<const double> a, std::span<const double> b,
                        int resamples, std::uint64_t seed) {
  if (a.empty() || b.empty()) {
    throw PreconditionError("permutation test needs two non-empty series");
  }
  if (resamples < 1) throw PreconditionError("resamples must be >= 1");

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double total = std::accumulate(pooled.begin(), pooled.end(), 0.0);
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());

  auto diff_of_prefix = [&](const std::vector<double>& xs) {
    const double sa =
        std::accumulate(xs.begin(), xs.begin() + static_cast<long>(a.size()), 0.0);
    return sa / na - (total - sa) / nb;
  };
  const double observed = diff_of_prefix(pooled);
  // Absorb summation-order rounding so exact ties count as ties.
  const double slack = 1e-12 * (1.0 + std::abs(observed));

  MoveRng rng(seed);
  int extreme = 0;
  for (int r = 0; r < resamples; ++r) {
    // Partial Fisher-Yates: only the first |a| slots matter.
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::size_t remaining = pooled.size() - i;
      const auto j = i + static_cast<std::size_t>(rng.next_unit() *
                                                  static_cast<double>(remaining));
      std::swap(pooled[i], pooled[std::min(j, pooled.size() - 1)]);
    }
    if (diff_of_prefix(pooled) <= observed + slack) ++extreme;
  }
  return (1.0 + extreme) / (1.0 + resamples);
}

MeanStderr mean_stderr(std::span<const double> xs) {
  if (xs.empty()) throw PreconditionError("mean of an empty series");
  MeanStderr out;
  out.n = xs.size();
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) /
             static_cast<double>(out.n);
  if (out.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
    out.std_error = sd / std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

}  // namespace rpsobs
