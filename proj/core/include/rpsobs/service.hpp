#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rpsobs/harness.hpp"

namespace rpsobs {

class SessionNotFound : public Error {
 public:
  using Error::Error;
};

class InvalidSessionState : public Error {
 public:
  using Error::Error;
};

enum class SessionState { Created, Running, Paused, Finished };

std::string_view session_state_name(SessionState s);

struct ServiceOptions {
  // Pause between evaluated rounds so a human can follow along.
  std::chrono::milliseconds round_delay{0};
  // When set, every session appends its events to <log_dir>/<id>.jsonl.
  std::optional<std::filesystem::path> log_dir;
};

struct SessionInfo {
  std::string id;
  MatchConfig config;
  SessionState state = SessionState::Created;
  int cursor = 0;  // last emitted round, 0 before the first event
  OutcomeDist truth;
  std::size_t events = 0;
  std::size_t failures = 0;
  std::optional<ManualOverride> active_override;
  std::vector<ReasoningSnapshot> reasoning;
};

struct OverrideAck {
  int applied_from_round = 0;
  OutcomeDist guess_dist;
  LossBreakdown losses;
};

// Owns running matches. Each session has one writer thread (its match loop)
// and any number of readers; overrides are applied between rounds.
class MatchService {
 public:
  explicit MatchService(ServiceOptions opts = {});
  ~MatchService();
  MatchService(const MatchService&) = delete;
  MatchService& operator=(const MatchService&) = delete;

  using ObserverFactory = std::function<std::unique_ptr<Observer>(const MatchConfig&)>;
  // Replaces make_observer for new sessions (tests inject scripted doubles).
  void set_observer_factory(ObserverFactory f);

  // Throws ValidationError for an invalid config.
  std::string create_match(const MatchConfig& cfg, bool autostart = true);
  std::vector<std::string> list() const;

  void start(const std::string& id);
  void pause(const std::string& id);
  void resume(const std::string& id);

  SessionInfo info(const std::string& id) const;
  const HeatmapGrid& heatmap(const std::string& id) const;
  OverrideAck apply_override(const std::string& id, const ManualOverride& ov);

  // Copies events with index >= from (0-based) into out, blocking up to
  // `wait` for at least one to appear. Returns false once the session has
  // finished and every event has been delivered.
  bool poll_events(const std::string& id, std::size_t from,
                   std::vector<RoundEvaluation>& out,
                   std::chrono::milliseconds wait) const;

  // Blocks until the session finishes or `timeout` passes.
  bool wait_finished(const std::string& id, std::chrono::milliseconds timeout) const;

  // Stops every match loop; sessions stay readable.
  void shutdown();

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  void run_loop(const std::shared_ptr<Session>& s);

  ServiceOptions opts_;
  ObserverFactory factory_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
};

// JSON HTTP front end:
//   GET  /catalog
//   GET  /matches              POST /matches
//   GET  /matches/{id}         GET  /matches/{id}/heatmap[?format=csv]
//   POST /matches/{id}/start|pause|resume|override
//   GET  /matches/{id}/events  (text/event-stream, backlog replay first)
class HttpService {
 public:
  explicit HttpService(MatchService& service,
                       std::optional<std::filesystem::path> static_dir = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds and serves on a background thread; port 0 picks a free port.
  // Returns the bound port.
  int start(const std::string& host, int port);
  // Blocking variant for the CLI.
  void listen(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rpsobs
