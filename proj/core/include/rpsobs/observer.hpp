#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpsobs/catalog.hpp"
#include "rpsobs/engine.hpp"

namespace rpsobs {

struct PromptSpec {
  std::string catalog_block = catalog_prompt_block();
  std::vector<RoundRecord> history;
  int history_limit = 50;
  bool require_reasoning = true;
};

// Role sentence, catalog, catalog notes, the last history_limit rounds,
// encoding notes, the step list and the output schema. Byte-stable.
std::string build_prompt(const PromptSpec& spec);

struct ObserverGuess {
  StrategyKey guess_s1;
  StrategyKey guess_s2;
  double confidence = 0.0;
  std::string reasoning;

  StrategyPair pair() const { return {guess_s1, guess_s2}; }
  friend bool operator==(const ObserverGuess&, const ObserverGuess&) = default;
};

// Accepts bare JSON, fenced code blocks and JSON embedded in prose.
// Throws ParseError for malformed JSON and ValidationError for bad codes or
// out-of-range confidence; both carry the raw text.
ObserverGuess parse_reply(std::string_view text);

// Compact JSON in the reply schema; parse_reply(serialize_guess(g)) == g.
std::string serialize_guess(const ObserverGuess& guess);

// What an observer may look at when asked for round `round`.
struct ObservationContext {
  int round = 0;
  std::span<const RoundRecord> history;  // every round before `round`
  std::string_view prompt;               // windowed prompt text
};

struct ObserverReply {
  ObserverGuess guess;
  std::string raw;   // verbatim model or scripted output
  int retries = 0;   // transport retries spent on this reply
};

class Observer {
 public:
  virtual ~Observer() = default;
  virtual ObserverReply observe(const ObservationContext& ctx) = 0;
  virtual std::string name() const = 0;
};

// Scripted observers.
ObserverGuess oracle_observer(const StrategyPair& truth);
// Nearest non-reactive catalog entry per player by L1 distance of empirical
// move frequencies; ties go to the alphabetically first key.
ObserverGuess frequency_observer(std::span<const RoundRecord> history);

class OracleObserver final : public Observer {
 public:
  explicit OracleObserver(StrategyPair truth) : truth_(truth) {}
  ObserverReply observe(const ObservationContext& ctx) override;
  std::string name() const override { return "oracle"; }

 private:
  StrategyPair truth_;
};

class FrequencyObserver final : public Observer {
 public:
  ObserverReply observe(const ObservationContext& ctx) override;
  std::string name() const override { return "frequency"; }
};

// Uniformly random pair of catalog codes, seeded.
class RandomObserver final : public Observer {
 public:
  explicit RandomObserver(std::uint64_t seed) : rng_(seed) {}
  ObserverReply observe(const ObservationContext& ctx) override;
  std::string name() const override { return "random"; }

 private:
  MoveRng rng_;
};

struct LlmEndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  double temperature = 0.2;
  double top_p = 0.7;
  std::chrono::milliseconds timeout{60'000};
  int max_retries = 3;
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds backoff_initial{500};
  std::chrono::milliseconds backoff_max{8'000};

  void validate() const;
};

// Chat-completion request body for one user message.
std::string chat_request_body(const LlmEndpointConfig& cfg,
                              std::string_view prompt);

// POSTs {base_url}/chat/completions, retrying HTTP 429, 5xx and connection
// failures with exponential backoff. Throws TransportError once retries are
// exhausted, ParseError/ValidationError for unusable replies.
ObserverReply llm_observer(const LlmEndpointConfig& cfg, std::string_view prompt);

class LlmObserver final : public Observer {
 public:
  explicit LlmObserver(LlmEndpointConfig cfg);
  ObserverReply observe(const ObservationContext& ctx) override;
  std::string name() const override { return "llm"; }

 private:
  LlmEndpointConfig cfg_;
};

}  // namespace rpsobs
