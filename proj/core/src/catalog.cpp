#include "rpsobs/catalog.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace rpsobs {
namespace {

constexpr std::string_view kWinLastRule =
    "Play the move that the opponent's previous move beats (e.g., if the "
    "opponent favored Scissors in the last round, I will favor Paper; and so "
    "on).";
constexpr std::string_view kLoseLastRule =
    "Play the move that beats the opponent's previous move (e.g., if the "
    "opponent favored Scissors in the last round, I will favor Rock; and so "
    "on).";
constexpr std::string_view kCopyLastRule =
    "Play the same move as the opponent's previous move (e.g., if the "
    "opponent favored Scissors in the last round, I will also favor "
    "Scissors; and so on).";

StrategySpec fixed(char code, std::string_view name, StrategyKind kind,
                   MoveDist dist) {
  return StrategySpec{StrategyKey(code), name, kind, dist, std::nullopt, {}};
}

StrategySpec reactive(char code, std::string_view name, ReactiveRule rule,
                      std::string_view text) {
  return StrategySpec{StrategyKey(code), name, StrategyKind::Reactive,
                      std::nullopt, rule, text};
}

// Rows are stored exactly as printed in the strategy library (0.333, 0.167,
// ...), not as exact thirds or sixths.
const std::array<StrategySpec, 19>& table() {
  using K = StrategyKind;
  static const std::array<StrategySpec, 19> kTable = {
      fixed('A', "Pure Scissors", K::Static, {0, 0, 1}),
      fixed('B', "Pure Rock", K::Static, {1, 0, 0}),
      fixed('C', "Pure Paper", K::Static, {0, 1, 0}),
      fixed('D', "Uniform Random", K::Mixture, {0.333, 0.333, 0.334}),
      fixed('E', "Rock + Paper", K::Mixture, {0.50, 0.50, 0}),
      fixed('F', "Rock + Scissors", K::Mixture, {0.50, 0, 0.50}),
      fixed('G', "Paper + Scissors", K::Mixture, {0, 0.50, 0.50}),
      fixed('H', "Rock Biased", K::Mixture, {0.50, 0.25, 0.25}),
      fixed('I', "Paper Biased", K::Mixture, {0.25, 0.50, 0.25}),
      fixed('J', "Scissors Biased", K::Mixture, {0.25, 0.25, 0.50}),
      fixed('K', "Rock > Paper", K::Mixture, {0.50, 0.333, 0.167}),
      fixed('L', "Rock > Scissors", K::Mixture, {0.50, 0.167, 0.333}),
      fixed('M', "Paper > Rock", K::Mixture, {0.333, 0.50, 0.167}),
      fixed('N', "Paper > Scissors", K::Mixture, {0.167, 0.50, 0.333}),
      fixed('O', "Scissors > Rock", K::Mixture, {0.333, 0.167, 0.50}),
      fixed('P', "Scissors > Paper", K::Mixture, {0.167, 0.333, 0.50}),
      reactive('X', "Win-Last", ReactiveRule::WinLast, kWinLastRule),
      reactive('Y', "Lose-Last", ReactiveRule::LoseLast, kLoseLastRule),
      reactive('Z', "Copy-Last", ReactiveRule::CopyLast, kCopyLastRule),
  };
  return kTable;
}

int table_index(char code) {
  if (code >= 'A' && code <= 'P') return code - 'A';
  if (code >= 'X' && code <= 'Z') return 16 + (code - 'X');
  return -1;
}

std::string format_prob(double x) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

}  // namespace

StrategyKey::StrategyKey(char code) : code_(code) {
  if (!is_known(code)) {
    throw UnknownKeyError(std::string("unknown strategy key '") + code + "'");
  }
}

bool StrategyKey::is_known(char code) { return table_index(code) >= 0; }

StrategyKey StrategyKey::parse(std::string_view text) {
  if (text.size() != 1) {
    throw UnknownKeyError("unknown strategy key '" + std::string(text) + "'");
  }
  return StrategyKey(text.front());
}

std::string StrategyPair::str() const { return p1.str() + "-" + p2.str(); }

StrategyPair StrategyPair::parse(std::string_view text) {
  std::string compact;
  for (char c : text) {
    if (c != '-' && c != ',' && c != ' ' && c != ':') compact.push_back(c);
  }
  if (compact.size() != 2) {
    throw UnknownKeyError("expected a strategy pair like 'H-C', got '" +
                          std::string(text) + "'");
  }
  return StrategyPair{StrategyKey(compact[0]), StrategyKey(compact[1])};
}

std::string_view kind_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Static:
      return "static";
    case StrategyKind::Mixture:
      return "mixture";
    case StrategyKind::Reactive:
      return "reactive";
  }
  return "?";
}

std::string_view rule_name(ReactiveRule rule) {
  switch (rule) {
    case ReactiveRule::WinLast:
      return "win_last";
    case ReactiveRule::LoseLast:
      return "lose_last";
    case ReactiveRule::CopyLast:
      return "copy_last";
  }
  return "?";
}

std::span<const StrategySpec> catalog() { return table(); }

const StrategySpec& get_strategy(StrategyKey key) {
  return table()[table_index(key.code())];
}

const StrategySpec& get_strategy(char code) {
  return get_strategy(StrategyKey(code));
}

MoveDist reactive_update_map(ReactiveRule rule, const MoveDist& opp) {
  opp.validate("opponent distribution");
  MoveDist out(0.0, 0.0, 0.0);
  for (Move m : kAllMoves) {
    switch (rule) {
      case ReactiveRule::CopyLast:
        out[m] += opp[m];
        break;
      case ReactiveRule::LoseLast:
        out[beats(m)] += opp[m];
        break;
      case ReactiveRule::WinLast:
        out[loses_to(m)] += opp[m];
        break;
    }
  }
  return out;
}

std::string catalog_prompt_block() {
  std::ostringstream os;
  os << "{\n";
  const auto& entries = table();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const StrategySpec& s = entries[i];
    os << "  \"" << s.key.code() << "\": {\n";
    if (s.is_reactive()) {
      os << "    \"type\": \"dynamic\",\n";
      os << "    \"name\": \"" << s.key.code() << "\",\n";
      os << "    \"rule\": \"" << s.rule_text << "\"}";
    } else {
      os << "    \"type\": \"static\",\n";
      os << "    \"name\": \"" << s.key.code() << " (" << s.name << ")\",\n";
      os << "    \"dist\": {\"rock\": " << format_prob(s.dist->rock())
         << ", \"paper\": " << format_prob(s.dist->paper())
         << ", \"scissors\": " << format_prob(s.dist->scissors()) << "}}";
    }
    os << (i + 1 < entries.size() ? ",\n" : "\n");
  }
  os << "}";
  return os.str();
}

nlohmann::ordered_json catalog_json() {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const StrategySpec& s : table()) {
    nlohmann::ordered_json entry;
    if (s.is_reactive()) {
      entry["type"] = "dynamic";
      entry["name"] = s.key.str();
      entry["rule"] = s.rule_text;
    } else {
      entry["type"] = "static";
      entry["name"] = s.key.str() + " (" + std::string(s.name) + ")";
      entry["dist"] = {{"rock", s.dist->rock()},
                       {"paper", s.dist->paper()},
                       {"scissors", s.dist->scissors()}};
    }
    doc[s.key.str()] = std::move(entry);
  }
  return doc;
}

}  // namespace rpsobs
