#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "rpsobs/observer.hpp"

namespace rpsobs {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw PreconditionError("LLM base URL needs a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

std::string reply_content(const std::string& body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("endpoint returned non-JSON body: ") + e.what(),
                     body);
  }
  // OpenAI-style chat completions, with a fallback for Anthropic-style
  // {"content": [{"type": "text", "text": ...}]} bodies.
  if (doc.contains("choices") && doc["choices"].is_array() &&
      !doc["choices"].empty()) {
    const auto& msg = doc["choices"][0]["message"];
    if (msg.contains("content") && msg["content"].is_string()) {
      return msg["content"].get<std::string>();
    }
  }
  if (doc.contains("content") && doc["content"].is_array()) {
    std::string text;
    for (const auto& part : doc["content"]) {
      if (part.contains("text") && part["text"].is_string()) {
        text += part["text"].get<std::string>();
      }
    }
    if (!text.empty()) return text;
  }
  throw ParseError("endpoint reply has no message content", body);
}

}  // namespace

void LlmEndpointConfig::validate() const {
  if (!(temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw PreconditionError("top_p must lie in (0, 1]");
  }
  if (max_retries < 0) throw PreconditionError("max_retries must be >= 0");
  if (timeout.count() <= 0) throw PreconditionError("timeout must be positive");
  if (model.empty()) throw PreconditionError("model name is empty");
  split_url(base_url);
}

std::string chat_request_body(const LlmEndpointConfig& cfg,
                              std::string_view prompt) {
  nlohmann::ordered_json body;
  body["model"] = cfg.model;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "user"}, {"content", std::string(prompt)}}});
  body["temperature"] = cfg.temperature;
  body["top_p"] = cfg.top_p;
  return body.dump();
}

ObserverReply llm_observer(const LlmEndpointConfig& cfg, std::string_view prompt) {
  cfg.validate();
  const SplitUrl url = split_url(cfg.base_url);

  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw TransportError("credential variable " + cfg.api_key_env +
                           " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(url.origin);
  const std::string path = url.prefix + "/chat/completions";
  const std::string body = chat_request_body(cfg, prompt);

  // Whole call, backoff included, stays within timeout * (retries + 1).
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + cfg.timeout * (cfg.max_retries + 1);
  auto delay = cfg.backoff_initial;
  std::string last_error;
  int attempt = 0;
  for (; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto left = deadline - Clock::now();
      if (left <= delay) break;
      std::this_thread::sleep_for(delay);
      delay = std::min(delay * 2, cfg.backoff_max);
    }
    const auto left = std::chrono::duration_cast<std::chrono::microseconds>(
        deadline - Clock::now());
    if (left.count() <= 0) break;
    // Connect and read phases share the attempt budget.
    const auto half = std::min<std::chrono::microseconds>(left, cfg.timeout) / 2;
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(half);
    const auto usecs = half - secs;
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("HTTP " + std::to_string(res->status) + ": " +
                           res->body);
    }
    std::string content = reply_content(res->body);
    ObserverGuess guess = parse_reply(content);
    return ObserverReply{std::move(guess), std::move(content), attempt};
  }
  throw TransportError("LLM endpoint unavailable after " +
                       std::to_string(attempt) +
                       " attempts: " + last_error);
}

LlmObserver::LlmObserver(LlmEndpointConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
}

ObserverReply LlmObserver::observe(const ObservationContext& ctx) {
  return llm_observer(cfg_, ctx.prompt);
}

}  // namespace rpsobs
