#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rpsobs/engine.hpp"
#include "rpsobs/harness.hpp"
#include "rpsobs/metrics.hpp"
#include "rpsobs/observer.hpp"

// JSON and CSV encodings for every record the harness reads or writes.
// Field names follow the wire schema: round/move1/move2/result for history,
// guess_s1/guess_s2/confidence/reasoning for guesses, win/draw/loss for
// outcome distributions, and MatchConfig member names for configs.
namespace rpsobs {

using Json = nlohmann::ordered_json;

// Throws ParseError on malformed text.
Json parse_json(std::string_view text);

Json to_json(const RoundRecord& r);
RoundRecord round_record_from_json(const Json& j);

Json to_json(const MoveDist& d);
MoveDist move_dist_from_json(const Json& j);

Json to_json(const OutcomeDist& d);
OutcomeDist outcome_dist_from_json(const Json& j);

Json to_json(const LossBreakdown& l);
LossBreakdown loss_breakdown_from_json(const Json& j);

Json to_json(const HeatmapGrid& g);
// Header row ",A,B,...,Z"; each row is guess1 then the union loss per guess2.
std::string heatmap_csv(const HeatmapGrid& g);

Json to_json(const ObserverGuess& g);
ObserverGuess observer_guess_from_json(const Json& j);

Json to_json(const SolverConfig& c);
Json to_json(const LlmEndpointConfig& c);
Json to_json(const MatchConfig& c);
// Missing fields keep their defaults. Accepts "pair": "H-C" or ["H","C"] and
// an optional "preset" name used as the base.
MatchConfig match_config_from_json(const Json& j);

Json to_json(const RoundEvaluation& e);
RoundEvaluation round_evaluation_from_json(const Json& j);

Json to_json(const FailedRound& f);
Json to_json(const MeanStderr& m);
Json to_json(const Summary& s);
// metric,mean,stderr,n rows followed by sir and counts.
std::string summary_csv(const Summary& s);

Json to_json(const ManualOverride& o);
ManualOverride manual_override_from_json(const Json& j);

Json to_json(const ExperimentResult& r);

std::vector<RoundEvaluation> read_evaluations_jsonl(std::istream& in);

}  // namespace rpsobs
