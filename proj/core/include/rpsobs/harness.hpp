#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rpsobs/catalog.hpp"
#include "rpsobs/engine.hpp"
#include "rpsobs/metrics.hpp"
#include "rpsobs/observer.hpp"
#include "rpsobs/solver.hpp"

namespace rpsobs {

enum class ObserverKind { Oracle, Frequency, Random, Llm };

std::string_view observer_kind_name(ObserverKind kind);
ObserverKind parse_observer_kind(std::string_view name);

struct ObserverSpec {
  ObserverKind kind = ObserverKind::Oracle;
  std::uint64_t seed = 0;  // random observer only
  LlmEndpointConfig llm;   // llm observer only
};

struct MatchConfig {
  StrategyPair pair{StrategyKey('H'), StrategyKey('C')};
  int rounds = 200;
  int warmup_rounds = 10;
  int history_limit = 50;
  int reasoning_interval = 20;
  std::uint64_t seed = 0;
  ObserverSpec observer;
  SolverConfig solver;
  MetricOptions metrics;

  void validate() const;
};

struct NamedPreset {
  std::string name;
  MatchConfig config;
};

// static-dynamic (H, C), dynamic-dynamic (N, G), dynamic-psychological (D, Y).
std::vector<NamedPreset> matchup_presets();
MatchConfig preset(std::string_view name);

std::unique_ptr<Observer> make_observer(const MatchConfig& cfg);

enum class EstimateSource { Observer, Manual };

struct RoundEvaluation {
  int round = 0;
  StrategyPair truth_pair{StrategyKey('H'), StrategyKey('C')};
  ObserverGuess guess{StrategyKey('D'), StrategyKey('D'), 0.0, {}};
  OutcomeDist guess_dist;
  OutcomeDist truth_dist;
  LossBreakdown losses;
  bool both_correct = false;
  EstimateSource source = EstimateSource::Observer;
  std::optional<StrategyPair> override_pair;  // manual pair-code override
  std::string raw;
};

struct FailedRound {
  int round = 0;
  std::string error;
  std::string raw;
};

using RoundOutcome = std::variant<RoundEvaluation, FailedRound>;

struct ReasoningSnapshot {
  int round = 0;
  std::string text;
};

struct Summary {
  MeanStderr union_loss;
  MeanStderr ce_norm;
  MeanStderr brier;
  MeanStderr ev_norm;
  double sir = 0.0;
  std::size_t evaluated = 0;
  std::size_t failed = 0;
};

struct ExperimentResult {
  MatchConfig config;
  Trajectory trajectory;
  OutcomeDist truth;
  bool truth_approximate = false;
  std::vector<RoundEvaluation> evaluations;
  std::vector<FailedRound> failures;
  std::vector<ReasoningSnapshot> reasoning_snapshots;
  Summary summary;
};

// Operator belief override. Exactly one of pair or dist is set.
struct ManualOverride {
  std::optional<StrategyPair> pair;
  std::optional<OutcomeDist> dist;
  int applied_from_round = 0;  // 0 = next evaluated round

  void validate() const;
};

using RoundSink = std::function<void(const RoundEvaluation&)>;

// Advances one match a round at a time. The trajectory, ground truth and
// loss grid are fixed at construction; each step queries the observer for
// the next post-warmup round and scores its estimate.
class MatchRunner {
 public:
  explicit MatchRunner(MatchConfig cfg, std::unique_ptr<Observer> observer = nullptr);

  const MatchConfig& config() const { return cfg_; }
  const Trajectory& trajectory() const { return trajectory_; }
  const GroundTruth& truth() const { return truth_; }
  const HeatmapGrid& grid() const { return grid_; }

  bool done() const { return next_round_ > cfg_.rounds; }
  int next_round() const { return next_round_; }

  RoundOutcome step();

  // Applies to rounds >= max(applied_from_round, next_round()). Returns the
  // round it takes effect from.
  int apply_override(const ManualOverride& ov);
  void clear_override() { override_.reset(); }
  // Estimate and losses an override yields, without advancing the match.
  std::pair<OutcomeDist, LossBreakdown> score_override(const ManualOverride& ov) const;

  const std::vector<RoundEvaluation>& evaluations() const { return evaluations_; }
  const std::vector<FailedRound>& failures() const { return failures_; }
  const std::vector<ReasoningSnapshot>& snapshots() const { return snapshots_; }

  ExperimentResult result() const;

 private:
  OutcomeDist pair_dist(const StrategyPair& pair) const;

  MatchConfig cfg_;
  std::unique_ptr<Observer> observer_;
  Trajectory trajectory_;
  GroundTruth truth_;
  std::vector<std::pair<StrategyPair, OutcomeDist>> outcomes_;
  HeatmapGrid grid_;
  int next_round_;
  std::optional<ManualOverride> override_;
  std::vector<RoundEvaluation> evaluations_;
  std::vector<FailedRound> failures_;
  std::vector<ReasoningSnapshot> snapshots_;
};

ExperimentResult run_experiment(const MatchConfig& cfg, const RoundSink& sink = {},
                                std::unique_ptr<Observer> observer = nullptr);

Summary summarize(std::span<const RoundEvaluation> evaluations,
                  std::size_t failed = 0);
Summary summarize(const ExperimentResult& result);

}  // namespace rpsobs
