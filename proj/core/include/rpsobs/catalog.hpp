#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "rpsobs/types.hpp"

namespace rpsobs {

// Single-letter catalog code (A-P, X-Z). Construction validates membership.
class StrategyKey {
 public:
  // Throws UnknownKeyError for letters outside the catalog.
  explicit StrategyKey(char code);
  static StrategyKey parse(std::string_view text);
  static bool is_known(char code);

  char code() const { return code_; }
  std::string str() const { return std::string(1, code_); }

  friend auto operator<=>(const StrategyKey&, const StrategyKey&) = default;

 private:
  char code_;
};

struct StrategyPair {
  StrategyKey p1;
  StrategyKey p2;

  std::string str() const;  // e.g. "H-C"
  static StrategyPair parse(std::string_view text);  // "H-C", "HC", "H,C"

  friend bool operator==(const StrategyPair&, const StrategyPair&) = default;
};

enum class StrategyKind { Static, Mixture, Reactive };

// Responses to the opponent's previous play. Each is a fixed permutation of
// the opponent's move distribution.
enum class ReactiveRule { WinLast, LoseLast, CopyLast };

std::string_view kind_name(StrategyKind kind);
std::string_view rule_name(ReactiveRule rule);

struct StrategySpec {
  StrategyKey key;
  std::string_view name;
  StrategyKind kind;
  std::optional<MoveDist> dist;       // static and mixture only
  std::optional<ReactiveRule> rule;   // reactive only
  std::string_view rule_text;         // prompt sentence, reactive only

  bool is_reactive() const { return kind == StrategyKind::Reactive; }
};

// All 19 entries in key order A..P, X, Y, Z.
std::span<const StrategySpec> catalog();

const StrategySpec& get_strategy(StrategyKey key);
const StrategySpec& get_strategy(char code);

// g_rule(opp): copy_last is the identity, lose_last moves mass on m to
// beats(m), win_last moves mass on m to loses_to(m).
MoveDist reactive_update_map(ReactiveRule rule, const MoveDist& opp);

// Byte-stable JSON object text used inside the observer prompt.
std::string catalog_prompt_block();

// {"A": {"type": ..., "name": ..., "dist": {...}}, ...}
nlohmann::ordered_json catalog_json();

}  // namespace rpsobs
