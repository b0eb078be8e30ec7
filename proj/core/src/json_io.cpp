#include "rpsobs/json_io.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace rpsobs {
namespace {

template <typename T>
T field(const Json& j, const char* name) {
  if (!j.contains(name)) {
    throw ValidationError(std::string("missing field '") + name + "'", j.dump());
  }
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad field '") + name + "': " + e.what(),
                          j.dump());
  }
}

template <typename T>
void maybe(const Json& j, const char* name, T& out) {
  if (j.contains(name) && !j.at(name).is_null()) out = field<T>(j, name);
}

StrategyPair pair_from_json(const Json& j) {
  if (j.is_string()) return StrategyPair::parse(j.get<std::string>());
  if (j.is_array() && j.size() == 2 && j[0].is_string() && j[1].is_string()) {
    return StrategyPair{StrategyKey::parse(j[0].get<std::string>()),
                        StrategyKey::parse(j[1].get<std::string>())};
  }
  throw ValidationError("pair must be \"H-C\" or [\"H\", \"C\"]", j.dump());
}

Json pair_to_json(const StrategyPair& p) { return Json::array({p.p1.str(), p.p2.str()}); }

}  // namespace

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), std::string(text));
  }
}

Json to_json(const RoundRecord& r) {
  return Json{{"round", r.round},
              {"move1", to_index(r.move1)},
              {"move2", to_index(r.move2)},
              {"result", r.result}};
}

RoundRecord round_record_from_json(const Json& j) {
  RoundRecord r;
  r.round = field<int>(j, "round");
  r.move1 = move_from_index(field<int>(j, "move1"));
  r.move2 = move_from_index(field<int>(j, "move2"));
  r.result = field<int>(j, "result");
  if (r.result != resolve_round(r.move1, r.move2)) {
    throw ValidationError("result inconsistent with moves", j.dump());
  }
  return r;
}

Json to_json(const MoveDist& d) {
  return Json{{"rock", d.rock()}, {"paper", d.paper()}, {"scissors", d.scissors()}};
}

MoveDist move_dist_from_json(const Json& j) {
  const MoveDist d(field<double>(j, "rock"), field<double>(j, "paper"),
                   field<double>(j, "scissors"));
  if (!d.valid()) throw ValidationError("move distribution is not on the simplex", j.dump());
  return d;
}

Json to_json(const OutcomeDist& d) {
  return Json{{"win", d.win}, {"draw", d.draw}, {"loss", d.loss}};
}

OutcomeDist outcome_dist_from_json(const Json& j) {
  OutcomeDist d;
  if (j.is_array()) {
    if (j.size() != 3 || !std::all_of(j.begin(), j.end(), [](const Json& x) {
          return x.is_number();
        })) {
      throw ValidationError("outcome array needs three numbers", j.dump());
    }
    d = OutcomeDist{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  } else {
    d = OutcomeDist{field<double>(j, "win"), field<double>(j, "draw"),
                    field<double>(j, "loss")};
  }
  if (!d.valid()) throw ValidationError("outcome distribution is not on the simplex", j.dump());
  return d;
}

Json to_json(const LossBreakdown& l) {
  return Json{{"ce", l.ce},           {"brier", l.brier},
              {"ev_loss", l.ev_loss}, {"ce_norm", l.ce_norm},
              {"brier_norm", l.brier_norm}, {"ev_norm", l.ev_norm},
              {"union", l.union_loss}};
}

LossBreakdown loss_breakdown_from_json(const Json& j) {
  LossBreakdown l;
  l.ce = field<double>(j, "ce");
  l.brier = field<double>(j, "brier");
  l.ev_loss = field<double>(j, "ev_loss");
  l.ce_norm = field<double>(j, "ce_norm");
  l.brier_norm = field<double>(j, "brier_norm");
  l.ev_norm = field<double>(j, "ev_norm");
  l.union_loss = field<double>(j, "union");
  return l;
}

Json to_json(const HeatmapGrid& g) {
  Json keys = Json::array();
  for (const StrategySpec& s : catalog()) keys.push_back(s.key.str());
  Json cells = Json::array();
  for (const HeatmapCell& c : g.cells) {
    cells.push_back(Json{{"guess1", c.guess.p1.str()},
                         {"guess2", c.guess.p2.str()},
                         {"dist", to_json(c.dist)},
                         {"losses", to_json(c.losses)}});
  }
  return Json{{"truth", to_json(g.truth)},
              {"brier_halved", g.options.brier_halved},
              {"ce_min", g.ce_min},
              {"ce_max", g.ce_max},
              {"keys", std::move(keys)},
              {"cells", std::move(cells)}};
}

std::string heatmap_csv(const HeatmapGrid& g) {
  std::ostringstream os;
  os.precision(17);
  for (const StrategySpec& s : catalog()) os << ',' << s.key.code();
  os << '\n';
  for (const StrategySpec& row : catalog()) {
    os << row.key.code();
    for (const StrategySpec& col : catalog()) {
      os << ',' << g.cell(StrategyPair{row.key, col.key}).losses.union_loss;
    }
    os << '\n';
  }
  return os.str();
}

Json to_json(const ObserverGuess& g) {
  return Json{{"guess_s1", g.guess_s1.str()},
              {"guess_s2", g.guess_s2.str()},
              {"confidence", g.confidence},
              {"reasoning", g.reasoning}};
}

ObserverGuess observer_guess_from_json(const Json& j) {
  return parse_reply(j.dump());
}

Json to_json(const SolverConfig& c) {
  return Json{{"alpha", c.alpha}, {"tol", c.tol}, {"max_iters", c.max_iters}};
}

Json to_json(const LlmEndpointConfig& c) {
  return Json{{"base_url", c.base_url},
              {"model", c.model},
              {"temperature", c.temperature},
              {"top_p", c.top_p},
              {"timeout_ms", c.timeout.count()},
              {"max_retries", c.max_retries},
              {"api_key_env", c.api_key_env},
              {"backoff_initial_ms", c.backoff_initial.count()},
              {"backoff_max_ms", c.backoff_max.count()}};
}

Json to_json(const MatchConfig& c) {
  Json observer{{"kind", observer_kind_name(c.observer.kind)},
                {"seed", c.observer.seed}};
  if (c.observer.kind == ObserverKind::Llm) observer["llm"] = to_json(c.observer.llm);
  return Json{{"pair", pair_to_json(c.pair)},
              {"rounds", c.rounds},
              {"warmup_rounds", c.warmup_rounds},
              {"history_limit", c.history_limit},
              {"reasoning_interval", c.reasoning_interval},
              {"seed", c.seed},
              {"observer", std::move(observer)},
              {"solver", to_json(c.solver)},
              {"brier_halved", c.metrics.brier_halved}};
}

MatchConfig match_config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object", j.dump());
  MatchConfig c;
  if (j.contains("preset")) c = preset(field<std::string>(j, "preset"));
  if (j.contains("pair")) c.pair = pair_from_json(j.at("pair"));
  maybe(j, "rounds", c.rounds);
  maybe(j, "warmup_rounds", c.warmup_rounds);
  maybe(j, "history_limit", c.history_limit);
  maybe(j, "reasoning_interval", c.reasoning_interval);
  maybe(j, "seed", c.seed);
  maybe(j, "brier_halved", c.metrics.brier_halved);
  if (j.contains("observer")) {
    const Json& o = j.at("observer");
    if (o.is_string()) {
      c.observer.kind = parse_observer_kind(o.get<std::string>());
    } else {
      if (o.contains("kind")) {
        c.observer.kind = parse_observer_kind(field<std::string>(o, "kind"));
      }
      maybe(o, "seed", c.observer.seed);
      if (o.contains("llm")) {
        const Json& l = o.at("llm");
        LlmEndpointConfig& llm = c.observer.llm;
        maybe(l, "base_url", llm.base_url);
        maybe(l, "model", llm.model);
        maybe(l, "temperature", llm.temperature);
        maybe(l, "top_p", llm.top_p);
        maybe(l, "max_retries", llm.max_retries);
        maybe(l, "api_key_env", llm.api_key_env);
        long long ms = -1;
        maybe(l, "timeout_ms", ms);
        if (ms >= 0) llm.timeout = std::chrono::milliseconds(ms);
        ms = -1;
        maybe(l, "backoff_initial_ms", ms);
        if (ms >= 0) llm.backoff_initial = std::chrono::milliseconds(ms);
        ms = -1;
        maybe(l, "backoff_max_ms", ms);
        if (ms >= 0) llm.backoff_max = std::chrono::milliseconds(ms);
      }
    }
  }
  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    maybe(s, "alpha", c.solver.alpha);
    maybe(s, "tol", c.solver.tol);
    maybe(s, "max_iters", c.solver.max_iters);
  }
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError(e.what(), j.dump());
  }
  return c;
}

Json to_json(const RoundEvaluation& e) {
  Json j{{"round", e.round},
         {"truth_pair", pair_to_json(e.truth_pair)},
         {"guess", to_json(e.guess)},
         {"guess_dist", to_json(e.guess_dist)},
         {"truth_dist", to_json(e.truth_dist)},
         {"losses", to_json(e.losses)},
         {"both_correct", e.both_correct},
         {"source", e.source == EstimateSource::Manual ? "manual" : "observer"}};
  if (e.override_pair) j["override_pair"] = pair_to_json(*e.override_pair);
  j["raw"] = e.raw;
  return j;
}

RoundEvaluation round_evaluation_from_json(const Json& j) {
  RoundEvaluation e;
  e.round = field<int>(j, "round");
  e.truth_pair = pair_from_json(j.at("truth_pair"));
  e.guess = observer_guess_from_json(j.at("guess"));
  e.guess_dist = outcome_dist_from_json(j.at("guess_dist"));
  e.truth_dist = outcome_dist_from_json(j.at("truth_dist"));
  e.losses = loss_breakdown_from_json(j.at("losses"));
  e.both_correct = field<bool>(j, "both_correct");
  const auto source = field<std::string>(j, "source");
  e.source = source == "manual" ? EstimateSource::Manual : EstimateSource::Observer;
  if (j.contains("override_pair")) e.override_pair = pair_from_json(j.at("override_pair"));
  maybe(j, "raw", e.raw);
  return e;
}

Json to_json(const FailedRound& f) {
  return Json{{"round", f.round}, {"failed", true}, {"error", f.error}, {"raw", f.raw}};
}

Json to_json(const MeanStderr& m) {
  return Json{{"mean", m.mean}, {"stderr", m.std_error}, {"n", m.n}};
}

Json to_json(const Summary& s) {
  return Json{{"union", to_json(s.union_loss)},
              {"ce_norm", to_json(s.ce_norm)},
              {"brier", to_json(s.brier)},
              {"ev_norm", to_json(s.ev_norm)},
              {"sir", s.sir},
              {"evaluated", s.evaluated},
              {"failed", s.failed}};
}

std::string summary_csv(const Summary& s) {
  std::ostringstream os;
  os.precision(17);
  os << "metric,mean,stderr,n\n";
  auto row = [&](const char* name, const MeanStderr& m) {
    os << name << ',' << m.mean << ',' << m.std_error << ',' << m.n << '\n';
  };
  row("union", s.union_loss);
  row("ce_norm", s.ce_norm);
  row("brier", s.brier);
  row("ev_norm", s.ev_norm);
  os << "sir," << s.sir << ",," << s.evaluated << '\n';
  os << "failed," << s.failed << ",,\n";
  return os.str();
}

Json to_json(const ManualOverride& o) {
  Json j{{"applied_from_round", o.applied_from_round}};
  if (o.pair) {
    j["source"] = "pair_codes";
    j["pair"] = pair_to_json(*o.pair);
  }
  if (o.dist) {
    j["source"] = "raw_distribution";
    j["dist"] = to_json(*o.dist);
  }
  return j;
}

ManualOverride manual_override_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("override must be a JSON object", j.dump());
  ManualOverride o;
  if (j.contains("pair") && !j.at("pair").is_null()) o.pair = pair_from_json(j.at("pair"));
  if (j.contains("dist") && !j.at("dist").is_null()) {
    o.dist = outcome_dist_from_json(j.at("dist"));
  }
  maybe(j, "applied_from_round", o.applied_from_round);
  if (j.contains("source")) {
    const auto source = field<std::string>(j, "source");
    if ((source == "pair_codes" && !o.pair) ||
        (source == "raw_distribution" && !o.dist) ||
        (source != "pair_codes" && source != "raw_distribution")) {
      throw ValidationError("override source does not match its payload", j.dump());
    }
  }
  o.validate();
  return o;
}

Json to_json(const ExperimentResult& r) {
  Json evals = Json::array();
  for (const auto& e : r.evaluations) evals.push_back(to_json(e));
  Json failures = Json::array();
  for (const auto& f : r.failures) failures.push_back(to_json(f));
  Json snaps = Json::array();
  for (const auto& s : r.reasoning_snapshots) {
    snaps.push_back(Json{{"round", s.round}, {"text", s.text}});
  }
  Json rounds = Json::array();
  for (const auto& rr : r.trajectory.rounds) rounds.push_back(to_json(rr));
  return Json{{"config", to_json(r.config)},
              {"truth", to_json(r.truth)},
              {"truth_approximate", r.truth_approximate},
              {"trajectory", std::move(rounds)},
              {"evaluations", std::move(evals)},
              {"failures", std::move(failures)},
              {"reasoning_snapshots", std::move(snaps)},
              {"summary", to_json(r.summary)}};
}

std::vector<RoundEvaluation> read_evaluations_jsonl(std::istream& in) {
  std::vector<RoundEvaluation> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = parse_json(line);
    if (j.contains("failed")) continue;
    out.push_back(round_evaluation_from_json(j));
  }
  return out;
}

}  // namespace rpsobs
