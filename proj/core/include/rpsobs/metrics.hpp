#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "rpsobs/catalog.hpp"
#include "rpsobs/solver.hpp"
#include "rpsobs/types.hpp"

namespace rpsobs {

inline constexpr double kCrossEntropyEpsilon = 1e-12;
inline constexpr double kEvLossMax = 4.0;
inline constexpr double kDegenerateCeNorm = 0.5;
inline constexpr int kCatalogSize = 19;
inline constexpr int kGridCells = kCatalogSize * kCatalogSize;

// -sum_c truth_c * ln(guess_c + 1e-12)
double cross_entropy(const OutcomeDist& truth, const OutcomeDist& guess);

// sum_c (guess_c - truth_c)^2, in [0, 2].
double brier(const OutcomeDist& truth, const OutcomeDist& guess);

// p_win - p_loss, in [-1, 1].
double expected_value(const OutcomeDist& p);

// (EV(truth) - EV(guess))^2, in [0, 4].
double ev_loss(const OutcomeDist& truth, const OutcomeDist& guess);

struct MetricOptions {
  // Divide Brier by its true maximum (2) instead of using it unchanged.
  bool brier_halved = false;
  friend bool operator==(const MetricOptions&, const MetricOptions&) = default;
};

struct LossBreakdown {
  double ce = 0.0;
  double brier = 0.0;
  double ev_loss = 0.0;
  double ce_norm = 0.0;
  double brier_norm = 0.0;
  double ev_norm = 0.0;
  double union_loss = 0.0;

  friend bool operator==(const LossBreakdown&, const LossBreakdown&) = default;
};

struct HeatmapCell {
  StrategyPair guess;
  OutcomeDist dist;
  LossBreakdown losses;
};

// Losses of every ordered catalog pair hypothesis against one ground truth.
struct HeatmapGrid {
  OutcomeDist truth;
  MetricOptions options;
  double ce_min = 0.0;
  double ce_max = 0.0;
  std::vector<HeatmapCell> cells;  // row-major: guess1 in catalog order

  bool degenerate() const { return ce_max == ce_min; }
  const HeatmapCell& cell(const StrategyPair& guess) const;
  // Normalized CE for an arbitrary raw value, clamped to [0, 1].
  double normalize_ce(double ce) const;
};

// Every ordered pair's solver outcome, in grid order.
std::vector<std::pair<StrategyPair, OutcomeDist>> pair_outcomes(
    const SolverConfig& cfg = {});

HeatmapGrid loss_grid(const OutcomeDist& truth, const SolverConfig& cfg = {},
                      const MetricOptions& opts = {});

// Builds a grid from precomputed pair outcomes (see pair_outcomes).
HeatmapGrid loss_grid(
    const OutcomeDist& truth,
    std::span<const std::pair<StrategyPair, OutcomeDist>> outcomes,
    const MetricOptions& opts = {});

LossBreakdown union_loss(const OutcomeDist& truth, const OutcomeDist& guess,
                         const HeatmapGrid& grid);

struct GuessLogEntry {
  int round = 0;
  StrategyKey guess_s1;
  StrategyKey guess_s2;
  double confidence = 0.0;
};

// Rounds strictly increasing, confidence in [0, 1].
class GuessLog {
 public:
  void append(GuessLogEntry entry);
  std::span<const GuessLogEntry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<GuessLogEntry> entries_;
};

// Percentage of logged rounds naming both true strategies.
double sir(const GuessLog& log, const StrategyPair& truth);

// One-sided label-shuffling test of mean(a) < mean(b).
// p = (1 + #{shuffled mean(a') - mean(b') <= observed}) / (1 + resamples).
double permutation_test(std::span<const double> a, std::span<const double> b,
                        int resamples, std::uint64_t seed = 0x5EED);

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;  // sample stdev / sqrt(n); 0 when n == 1
  std::size_t n = 0;
};

MeanStderr mean_stderr(std::span<const double> xs);

}  // namespace rpsobs
