#include "rpsobs/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rpsobs/metrics.hpp"

namespace rpsobs {
namespace {

constexpr std::string_view kRole =
    "You are an RPS observer. Infer the most likely strategies for P1 and P2\n"
    "from the catalog and history. Respond with JSON only.\n";

constexpr std::string_view kCatalogNotes =
    "Notes:\n"
    "- Static strategies (type=static): fixed move distribution "
    "dist={rock,paper,scissors}.\n"
    "- Dynamic strategies (type=dynamic): depend on opponent's previous move;\n"
    "  field 'rule' describes the behavior.\n";

constexpr std::string_view kHistoryNotes =
    "Notes: an array, each element contains:\n"
    "- move1: Player 1 move (0=Rock, 1=Paper, 2=Scissors)\n"
    "- move2: Player 2 move (0=Rock, 1=Paper, 2=Scissors)\n"
    "- result: from Player 1 perspective (1=win, 0=draw, -1=loss)\n";

constexpr std::string_view kSteps =
    "Think step by step:\n"
    "1. Compute approximate move frequencies for Player 1.\n"
    "2. Match Player 1's distribution to the closest catalog strategy.\n"
    "3. Do the same for Player 2.\n"
    "4. Estimate confidence.\n"
    "5. Output ONLY the following JSON and nothing else.\n";

void write_history(std::ostream& os, std::span<const RoundRecord> rounds) {
  os << '[';
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const RoundRecord& r = rounds[i];
    if (i > 0) os << ",\n ";
    os << "{\"round\": " << r.round << ", \"move1\": " << to_index(r.move1)
       << ", \"move2\": " << to_index(r.move2) << ", \"result\": " << r.result
       << '}';
  }
  os << "]\n";
}

std::string_view strip_to_object(std::string_view text) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    return {};
  }
  return text.substr(open, close - open + 1);
}

StrategyKey reply_key(const nlohmann::json& doc, const char* field,
                      std::string_view raw) {
  if (!doc.contains(field) || !doc[field].is_string()) {
    throw ValidationError(std::string("reply field '") + field +
                              "' missing or not a string",
                          std::string(raw));
  }
  std::string code = doc[field].get<std::string>();
  // Tolerate "'H'" and " H " which models occasionally produce.
  code.erase(std::remove_if(code.begin(), code.end(),
                            [](char c) { return c == '\'' || c == ' '; }),
             code.end());
  if (code.size() != 1 || !StrategyKey::is_known(code[0])) {
    throw ValidationError("unknown strategy code '" +
                              doc[field].get<std::string>() + "' in " + field,
                          std::string(raw));
  }
  return StrategyKey(code[0]);
}

MoveDist empirical(std::span<const RoundRecord> history, bool player1) {
  std::array<double, 3> counts{};
  for (const RoundRecord& r : history) {
    counts[to_index(player1 ? r.move1 : r.move2)] += 1.0;
  }
  const auto n = static_cast<double>(history.size());
  return MoveDist(counts[0] / n, counts[1] / n, counts[2] / n);
}

std::pair<StrategyKey, double> nearest_fixed(const MoveDist& freq) {
  const StrategySpec* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  for (const StrategySpec& s : catalog()) {
    if (s.is_reactive()) continue;
    const double d = l1_distance(freq, *s.dist);
    if (d < best_d - 1e-12) {
      best = &s;
      best_d = d;
    }
  }
  return {best->key, best_d};
}

}  // namespace

std::string build_prompt(const PromptSpec& spec) {
  if (spec.history_limit < 1) {
    throw PreconditionError("history_limit must be >= 1");
  }
  std::span<const RoundRecord> history(spec.history);
  if (history.size() > static_cast<std::size_t>(spec.history_limit)) {
    history = history.last(static_cast<std::size_t>(spec.history_limit));
  }

  std::ostringstream os;
  os << kRole << '\n';
  os << "[Strategy Catalog]\n" << spec.catalog_block << "\n\n";
  os << kCatalogNotes << '\n';
  os << "[Game History]\n";
  write_history(os, history);
  os << '\n' << kHistoryNotes << '\n' << kSteps << '\n';
  os << "{\n"
        "  \"guess_s1\": <code like 'H'>,\n"
        "  \"guess_s2\": <code like 'Z'>,\n";
  if (spec.require_reasoning) {
    os << "  \"confidence\": <decimal between 0 and 1>,\n"
          "  \"reasoning\": <3-5 phrases; separated by semicolons>\n";
  } else {
    os << "  \"confidence\": <decimal between 0 and 1>\n";
  }
  os << "}\n";
  return os.str();
}

ObserverGuess parse_reply(std::string_view text) {
  const std::string raw(text);
  const std::string_view body = strip_to_object(text);
  if (body.empty()) throw ParseError("reply contains no JSON object", raw);

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed reply JSON: ") + e.what(), raw);
  }
  if (!doc.is_object()) throw ParseError("reply is not a JSON object", raw);

  ObserverGuess g{reply_key(doc, "guess_s1", raw), reply_key(doc, "guess_s2", raw),
                  0.0, {}};
  if (!doc.contains("confidence")) {
    throw ValidationError("reply field 'confidence' missing", raw);
  }
  const auto& conf = doc["confidence"];
  if (conf.is_number()) {
    g.confidence = conf.get<double>();
  } else if (conf.is_string()) {
    try {
      std::size_t used = 0;
      const std::string s = conf.get<std::string>();
      g.confidence = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw ValidationError("confidence is not a number", raw);
    }
  } else {
    throw ValidationError("confidence is not a number", raw);
  }
  if (!(g.confidence >= 0.0 && g.confidence <= 1.0)) {
    throw ValidationError("confidence outside [0, 1]", raw);
  }

  if (doc.contains("reasoning")) {
    const auto& r = doc["reasoning"];
    if (r.is_string()) {
      g.reasoning = r.get<std::string>();
    } else if (r.is_array()) {
      for (const auto& phrase : r) {
        if (!g.reasoning.empty()) g.reasoning += "; ";
        g.reasoning += phrase.is_string() ? phrase.get<std::string>() : phrase.dump();
      }
    } else if (!r.is_null()) {
      throw ValidationError("reasoning must be a string", raw);
    }
  }
  return g;
}

std::string serialize_guess(const ObserverGuess& guess) {
  nlohmann::ordered_json doc;
  doc["guess_s1"] = guess.guess_s1.str();
  doc["guess_s2"] = guess.guess_s2.str();
  doc["confidence"] = guess.confidence;
  doc["reasoning"] = guess.reasoning;
  return doc.dump();
}

ObserverGuess oracle_observer(const StrategyPair& truth) {
  return ObserverGuess{truth.p1, truth.p2, 1.0, {}};
}

ObserverGuess frequency_observer(std::span<const RoundRecord> history) {
  if (history.empty()) {
    throw PreconditionError("frequency observer needs a non-empty history");
  }
  const auto [k1, d1] = nearest_fixed(empirical(history, true));
  const auto [k2, d2] = nearest_fixed(empirical(history, false));
  const double confidence = std::clamp(1.0 - (d1 + d2) / 2.0 / 2.0, 0.0, 1.0);
  return ObserverGuess{k1, k2, confidence, {}};
}

ObserverReply OracleObserver::observe(const ObservationContext&) {
  ObserverGuess g = oracle_observer(truth_);
  return ObserverReply{g, serialize_guess(g), 0};
}

ObserverReply FrequencyObserver::observe(const ObservationContext& ctx) {
  ObserverGuess g = frequency_observer(ctx.history);
  return ObserverReply{g, serialize_guess(g), 0};
}

ObserverReply RandomObserver::observe(const ObservationContext&) {
  const auto all = catalog();
  auto pick = [&] {
    const auto i = static_cast<std::size_t>(rng_.next_unit() *
                                            static_cast<double>(all.size()));
    return all[std::min(i, all.size() - 1)].key;
  };
  const StrategyKey a = pick();
  const StrategyKey b = pick();
  ObserverGuess g{a, b, 1.0 / kGridCells, {}};
  return ObserverReply{g, serialize_guess(g), 0};
}

}  // namespace rpsobs
