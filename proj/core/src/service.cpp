#include "rpsobs/service.hpp"

#include <condition_variable>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "rpsobs/json_io.hpp"

namespace rpsobs {

std::string_view session_state_name(SessionState s) {
  switch (s) {
    case SessionState::Created:
      return "created";
    case SessionState::Running:
      return "running";
    case SessionState::Paused:
      return "paused";
    case SessionState::Finished:
      return "finished";
  }
  return "?";
}

struct MatchService::Session {
  std::string id;
  MatchConfig config;

  // Guards the runner; held by the match loop while a round is evaluated and
  // by override application, which therefore lands on a round boundary.
  std::mutex runner_mu;
  std::unique_ptr<MatchRunner> runner;

  mutable std::mutex mu;
  mutable std::condition_variable cv;
  SessionState state = SessionState::Created;
  bool stop = false;
  int cursor = 0;
  std::vector<RoundEvaluation> events;
  std::size_t failures = 0;
  std::optional<ManualOverride> active_override;
  std::vector<ReasoningSnapshot> reasoning;
  std::thread loop;
  std::ofstream log;
};

MatchService::MatchService(ServiceOptions opts)
    : opts_(std::move(opts)), factory_(make_observer) {
  if (opts_.log_dir) std::filesystem::create_directories(*opts_.log_dir);
}

MatchService::~MatchService() { shutdown(); }

void MatchService::set_observer_factory(ObserverFactory f) {
  std::lock_guard lock(mu_);
  factory_ = std::move(f);
}

std::string MatchService::create_match(const MatchConfig& cfg, bool autostart) {
  try {
    cfg.validate();
  } catch (const PreconditionError& e) {
    throw ValidationError(e.what());
  }
  auto s = std::make_shared<Session>();
  s->config = cfg;
  {
    std::lock_guard lock(mu_);
    std::random_device rd;
    std::ostringstream id;
    id << std::hex << ((static_cast<std::uint64_t>(rd()) << 32) ^ rd()) << '-'
       << ++counter_;
    s->id = id.str();
    s->runner = std::make_unique<MatchRunner>(cfg, factory_(cfg));
  }
  if (opts_.log_dir) s->log.open(*opts_.log_dir / (s->id + ".jsonl"));
  s->loop = std::thread([this, s] { run_loop(s); });
  {
    std::lock_guard lock(mu_);
    sessions_.emplace(s->id, s);
  }
  if (autostart) start(s->id);
  return s->id;
}

std::vector<std::string> MatchService::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (const auto& [id, s] : sessions_) ids.push_back(id);
  return ids;
}

std::shared_ptr<MatchService::Session> MatchService::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("unknown session " + id);
  return it->second;
}

void MatchService::start(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->state != SessionState::Created) {
    throw InvalidSessionState("session " + id + " already started");
  }
  s->state = SessionState::Running;
  s->cv.notify_all();
}

void MatchService::pause(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->state != SessionState::Running) {
    throw InvalidSessionState("only a running session can be paused");
  }
  s->state = SessionState::Paused;
  s->cv.notify_all();
}

void MatchService::resume(const std::string& id) {
  auto s = find(id);
  std::lock_guard lock(s->mu);
  if (s->state != SessionState::Paused) {
    throw InvalidSessionState("only a paused session can be resumed");
  }
  s->state = SessionState::Running;
  s->cv.notify_all();
}

SessionInfo MatchService::info(const std::string& id) const {
  auto s = find(id);
  SessionInfo out;
  out.id = s->id;
  out.config = s->config;
  out.truth = s->runner->truth().dist;
  std::lock_guard lock(s->mu);
  out.state = s->state;
  out.cursor = s->cursor;
  out.events = s->events.size();
  out.failures = s->failures;
  out.active_override = s->active_override;
  out.reasoning = s->reasoning;
  return out;
}

const HeatmapGrid& MatchService::heatmap(const std::string& id) const {
  return find(id)->runner->grid();
}

OverrideAck MatchService::apply_override(const std::string& id,
                                         const ManualOverride& ov) {
  auto s = find(id);
  ov.validate();
  {
    std::lock_guard lock(s->mu);
    if (s->state != SessionState::Running && s->state != SessionState::Paused) {
      throw InvalidSessionState("overrides need a running or paused session");
    }
  }
  std::lock_guard runner_lock(s->runner_mu);
  OverrideAck ack;
  ack.applied_from_round = s->runner->apply_override(ov);
  std::tie(ack.guess_dist, ack.losses) = s->runner->score_override(ov);
  std::lock_guard lock(s->mu);
  s->active_override = ov;
  s->active_override->applied_from_round = ack.applied_from_round;
  return ack;
}

bool MatchService::poll_events(const std::string& id, std::size_t from,
                               std::vector<RoundEvaluation>& out,
                               std::chrono::milliseconds wait) const {
  auto s = find(id);
  std::unique_lock lock(s->mu);
  s->cv.wait_for(lock, wait, [&] {
    return s->events.size() > from || s->state == SessionState::Finished || s->stop;
  });
  for (std::size_t i = from; i < s->events.size(); ++i) out.push_back(s->events[i]);
  const bool ended = s->state == SessionState::Finished || s->stop;
  return !(ended && from + out.size() >= s->events.size());
}

bool MatchService::wait_finished(const std::string& id,
                                 std::chrono::milliseconds timeout) const {
  auto s = find(id);
  std::unique_lock lock(s->mu);
  return s->cv.wait_for(lock, timeout,
                        [&] { return s->state == SessionState::Finished; });
}

void MatchService::run_loop(const std::shared_ptr<Session>& s) {
  for (;;) {
    {
      std::unique_lock lock(s->mu);
      s->cv.wait(lock, [&] { return s->stop || s->state == SessionState::Running; });
      if (s->stop) return;
    }

    std::optional<RoundOutcome> out;
    std::optional<ReasoningSnapshot> snap;
    {
      std::lock_guard runner_lock(s->runner_mu);
      if (!s->runner->done()) {
        out = s->runner->step();
        const auto& snaps = s->runner->snapshots();
        if (!snaps.empty() && std::holds_alternative<RoundEvaluation>(*out) &&
            snaps.back().round == std::get<RoundEvaluation>(*out).round) {
          snap = snaps.back();
        }
      }
    }

    std::unique_lock lock(s->mu);
    if (!out) {
      s->state = SessionState::Finished;
      s->cv.notify_all();
      return;
    }
    if (const auto* ev = std::get_if<RoundEvaluation>(&*out)) {
      s->events.push_back(*ev);
      s->cursor = ev->round;
      if (s->log.is_open()) s->log << to_json(*ev).dump() << '\n' << std::flush;
    } else {
      const auto& failed = std::get<FailedRound>(*out);
      ++s->failures;
      if (s->log.is_open()) s->log << to_json(failed).dump() << '\n' << std::flush;
    }
    if (snap) s->reasoning.push_back(*snap);
    s->cv.notify_all();
    if (opts_.round_delay.count() > 0) {
      s->cv.wait_for(lock, opts_.round_delay, [&] { return s->stop; });
    }
  }
}

void MatchService::shutdown() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, s] : sessions_) all.push_back(s);
  }
  for (auto& s : all) {
    {
      std::lock_guard lock(s->mu);
      s->stop = true;
      s->cv.notify_all();
    }
    if (s->loop.joinable()) s->loop.join();
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr const char* kJson = "application/json";

Json info_json(const SessionInfo& i) {
  Json reasoning = Json::array();
  for (const auto& r : i.reasoning) reasoning.push_back(Json{{"round", r.round}, {"text", r.text}});
  Json j{{"id", i.id},
         {"state", session_state_name(i.state)},
         {"cursor", i.cursor},
         {"config", to_json(i.config)},
         {"truth", to_json(i.truth)},
         {"events", i.events},
         {"failures", i.failures},
         {"reasoning", std::move(reasoning)}};
  j["override"] = i.active_override ? to_json(*i.active_override) : Json(nullptr);
  return j;
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send_json(res, status, Json{{"error", msg}});
}

// Maps library exceptions onto HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const SessionNotFound& e) {
    send_error(res, 404, e.what());
  } catch (const InvalidSessionState& e) {
    send_error(res, 409, e.what());
  } catch (const Error& e) {
    send_error(res, 400, e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, e.what());
  }
}

}  // namespace

struct HttpService::Impl {
  MatchService& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(MatchService& s) : service(s) {}
};

HttpService::HttpService(MatchService& service,
                         std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  MatchService& svc = impl_->service;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
  if (static_dir) srv.set_mount_point("/", static_dir->string());

  srv.Get("/catalog", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, catalog_json());
  });

  srv.Get("/matches", [&svc](const httplib::Request&, httplib::Response& res) {
    Json arr = Json::array();
    for (const auto& id : svc.list()) arr.push_back(info_json(svc.info(id)));
    send_json(res, 200, arr);
  });

  srv.Post("/matches", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = req.body.empty() ? Json::object() : parse_json(req.body);
      const MatchConfig cfg = match_config_from_json(body);
      const bool autostart = body.value("autostart", true);
      const std::string id = svc.create_match(cfg, autostart);
      send_json(res, 201, info_json(svc.info(id)));
    });
  });

  srv.Get(R"(/matches/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, info_json(svc.info(req.matches[1]))); });
  });

  srv.Get(R"(/matches/([^/]+)/heatmap)",
          [&svc](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              const HeatmapGrid& g = svc.heatmap(req.matches[1]);
              if (req.get_param_value("format") == "csv") {
                res.set_content(heatmap_csv(g), "text/csv");
              } else {
                send_json(res, 200, to_json(g));
              }
            });
          });

  auto transition = [&svc](void (MatchService::*op)(const std::string&)) {
    return [&svc, op](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        (svc.*op)(req.matches[1]);
        send_json(res, 200, info_json(svc.info(req.matches[1])));
      });
    };
  };
  srv.Post(R"(/matches/([^/]+)/start)", transition(&MatchService::start));
  srv.Post(R"(/matches/([^/]+)/pause)", transition(&MatchService::pause));
  srv.Post(R"(/matches/([^/]+)/resume)", transition(&MatchService::resume));

  srv.Post(R"(/matches/([^/]+)/override)",
           [&svc](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const ManualOverride ov = manual_override_from_json(parse_json(req.body));
               const OverrideAck ack = svc.apply_override(req.matches[1], ov);
               send_json(res, 200,
                         Json{{"applied_from_round", ack.applied_from_round},
                              {"source", "manual"},
                              {"guess_dist", to_json(ack.guess_dist)},
                              {"losses", to_json(ack.losses)}});
             });
           });

  srv.Get(R"(/matches/([^/]+)/events)", [&svc](const httplib::Request& req,
                                               httplib::Response& res) {
    const std::string id = req.matches[1];
    guarded(res, [&] {
      svc.info(id);  // 404 before switching to a stream
      auto next = std::make_shared<std::size_t>(0);
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [&svc, id, next](std::size_t, httplib::DataSink& sink) {
            std::vector<RoundEvaluation> batch;
            const bool more =
                svc.poll_events(id, *next, batch, std::chrono::milliseconds(1'000));
            std::string chunk;
            for (const auto& ev : batch) {
              chunk += "id: " + std::to_string(ev.round) + "\nevent: round\ndata: " +
                       to_json(ev).dump() + "\n\n";
            }
            *next += batch.size();
            if (batch.empty() && more) chunk = ": keep-alive\n\n";
            if (!more) chunk += "event: end\ndata: {}\n\n";
            if (!sink.write(chunk.data(), chunk.size())) return false;
            if (!more) sink.done();
            return true;
          });
    });
  });
}

HttpService::~HttpService() { stop(); }

int HttpService::start(const std::string& host, int port) {
  auto& srv = impl_->server;
  int bound = port;
  if (port == 0) {
    bound = srv.bind_to_any_port(host);
  } else if (!srv.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw TransportError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([&srv] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  return bound;
}

void HttpService::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    throw TransportError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void HttpService::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace rpsobs
