#include "rpsobs/harness.hpp"

#include <algorithm>

namespace rpsobs {

std::string_view observer_kind_name(ObserverKind kind) {
  switch (kind) {
    case ObserverKind::Oracle:
      return "oracle";
    case ObserverKind::Frequency:
      return "frequency";
    case ObserverKind::Random:
      return "random";
    case ObserverKind::Llm:
      return "llm";
  }
  return "?";
}

ObserverKind parse_observer_kind(std::string_view name) {
  for (auto k : {ObserverKind::Oracle, ObserverKind::Frequency,
                 ObserverKind::Random, ObserverKind::Llm}) {
    if (observer_kind_name(k) == name) return k;
  }
  throw PreconditionError("unknown observer '" + std::string(name) + "'");
}

void MatchConfig::validate() const {
  if (rounds < 1) throw PreconditionError("rounds must be >= 1");
  if (warmup_rounds < 0 || warmup_rounds >= rounds) {
    throw PreconditionError("warmup_rounds must be in [0, rounds)");
  }
  if (history_limit < 1) throw PreconditionError("history_limit must be >= 1");
  if (reasoning_interval < 1) {
    throw PreconditionError("reasoning_interval must be >= 1");
  }
  solver.validate();
  if (observer.kind == ObserverKind::Llm) observer.llm.validate();
}

std::vector<NamedPreset> matchup_presets() {
  auto make = [](char a, char b) {
    MatchConfig c;
    c.pair = StrategyPair{StrategyKey(a), StrategyKey(b)};
    c.rounds = 200;
    c.warmup_rounds = 10;
    c.history_limit = 50;
    c.reasoning_interval = 20;
    return c;
  };
  return {
      {"static-dynamic", make('H', 'C')},
      {"dynamic-dynamic", make('N', 'G')},
      // Catalog D (uniform), although the regime's prose quotes N's row.
      {"dynamic-psychological", make('D', 'Y')},
  };
}

MatchConfig preset(std::string_view name) {
  for (auto& p : matchup_presets()) {
    if (p.name == name) return p.config;
  }
  throw PreconditionError("unknown preset '" + std::string(name) + "'");
}

std::unique_ptr<Observer> make_observer(const MatchConfig& cfg) {
  switch (cfg.observer.kind) {
    case ObserverKind::Oracle:
      return std::make_unique<OracleObserver>(cfg.pair);
    case ObserverKind::Frequency:
      return std::make_unique<FrequencyObserver>();
    case ObserverKind::Random:
      return std::make_unique<RandomObserver>(cfg.observer.seed);
    case ObserverKind::Llm:
      return std::make_unique<LlmObserver>(cfg.observer.llm);
  }
  throw PreconditionError("unsupported observer kind");
}

void ManualOverride::validate() const {
  if (pair.has_value() == dist.has_value()) {
    throw ValidationError("override needs exactly one of pair or dist");
  }
  if (dist) {
    if (!dist->valid()) {
      throw ValidationError("override distribution is not on the simplex");
    }
  }
  if (applied_from_round < 0) {
    throw ValidationError("applied_from_round must be >= 0");
  }
}

MatchRunner::MatchRunner(MatchConfig cfg, std::unique_ptr<Observer> observer)
    : cfg_(std::move(cfg)), observer_(std::move(observer)) {
  cfg_.validate();
  if (!observer_) observer_ = make_observer(cfg_);
  trajectory_ = play_match(cfg_.pair, cfg_.rounds, cfg_.seed);
  truth_ = ground_truth(cfg_.pair, cfg_.solver);
  outcomes_ = pair_outcomes(cfg_.solver);
  grid_ = loss_grid(truth_.dist, outcomes_, cfg_.metrics);
  next_round_ = cfg_.warmup_rounds + 1;
}

OutcomeDist MatchRunner::pair_dist(const StrategyPair& pair) const {
  for (const auto& [p, d] : outcomes_) {
    if (p == pair) return d;
  }
  return ground_truth(pair, cfg_.solver).dist;
}

int MatchRunner::apply_override(const ManualOverride& ov) {
  ov.validate();
  ManualOverride applied = ov;
  applied.applied_from_round = std::max(ov.applied_from_round, next_round_);
  override_ = applied;
  return applied.applied_from_round;
}

std::pair<OutcomeDist, LossBreakdown> MatchRunner::score_override(
    const ManualOverride& ov) const {
  ov.validate();
  const OutcomeDist d = ov.pair ? pair_dist(*ov.pair) : *ov.dist;
  return {d, union_loss(truth_.dist, d, grid_)};
}

RoundOutcome MatchRunner::step() {
  if (done()) throw PreconditionError("match already finished");
  const int round = next_round_++;

  const std::span<const RoundRecord> seen(trajectory_.rounds.data(),
                                          static_cast<std::size_t>(round - 1));
  const auto window = seen.last(
      std::min(seen.size(), static_cast<std::size_t>(cfg_.history_limit)));
  PromptSpec prompt_spec;
  prompt_spec.history.assign(window.begin(), window.end());
  prompt_spec.history_limit = cfg_.history_limit;
  const std::string prompt = build_prompt(prompt_spec);

  std::optional<ObserverReply> reply;
  try {
    reply = observer_->observe(ObservationContext{round, seen, prompt});
  } catch (const ReplyError& e) {
    failures_.push_back(FailedRound{round, e.what(), e.raw()});
    return failures_.back();
  } catch (const Error& e) {
    failures_.push_back(FailedRound{round, e.what(), {}});
    return failures_.back();
  }

  RoundEvaluation ev;
  ev.round = round;
  ev.truth_pair = cfg_.pair;
  ev.guess = reply->guess;
  ev.truth_dist = truth_.dist;
  ev.raw = std::move(reply->raw);
  ev.both_correct = ev.guess.pair() == cfg_.pair;
  if (override_ && round >= override_->applied_from_round) {
    ev.source = EstimateSource::Manual;
    ev.override_pair = override_->pair;
    ev.guess_dist = override_->pair ? pair_dist(*override_->pair) : *override_->dist;
  } else {
    ev.guess_dist = pair_dist(ev.guess.pair());
  }
  ev.losses = union_loss(truth_.dist, ev.guess_dist, grid_);

  if (round % cfg_.reasoning_interval == 0) {
    snapshots_.push_back(ReasoningSnapshot{round, ev.guess.reasoning});
  }
  evaluations_.push_back(ev);
  return ev;
}

ExperimentResult MatchRunner::result() const {
  ExperimentResult r;
  r.config = cfg_;
  r.trajectory = trajectory_;
  r.truth = truth_.dist;
  r.truth_approximate = truth_.approximate();
  r.evaluations = evaluations_;
  r.failures = failures_;
  r.reasoning_snapshots = snapshots_;
  if (!evaluations_.empty()) r.summary = summarize(evaluations_, failures_.size());
  r.summary.failed = failures_.size();
  return r;
}

ExperimentResult run_experiment(const MatchConfig& cfg, const RoundSink& sink,
                                std::unique_ptr<Observer> observer) {
  MatchRunner runner(cfg, std::move(observer));
  while (!runner.done()) {
    RoundOutcome out = runner.step();
    if (sink) {
      if (const auto* ev = std::get_if<RoundEvaluation>(&out)) sink(*ev);
    }
  }
  return runner.result();
}

Summary summarize(std::span<const RoundEvaluation> evaluations,
                  std::size_t failed) {
  if (evaluations.empty()) {
    throw PreconditionError("no successful evaluations to summarize");
  }
  std::vector<double> u, ce, br, ev;
  GuessLog log;
  for (const RoundEvaluation& e : evaluations) {
    u.push_back(e.losses.union_loss);
    ce.push_back(e.losses.ce_norm);
    br.push_back(e.losses.brier);
    ev.push_back(e.losses.ev_norm);
    log.append(GuessLogEntry{e.round, e.guess.guess_s1, e.guess.guess_s2,
                             e.guess.confidence});
  }
  Summary s;
  s.union_loss = mean_stderr(u);
  s.ce_norm = mean_stderr(ce);
  s.brier = mean_stderr(br);
  s.ev_norm = mean_stderr(ev);
  s.sir = sir(log, evaluations.front().truth_pair);
  s.evaluated = evaluations.size();
  s.failed = failed;
  return s;
}

Summary summarize(const ExperimentResult& result) {
  return summarize(result.evaluations, result.failures.size());
}

}  // namespace rpsobs
