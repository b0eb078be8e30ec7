// rpsobs: command line front end for the observer evaluation harness.
//
//   rpsobs run      --preset static-dynamic --observer frequency --out runs/hc
//   rpsobs heatmap  --pair H-C --out hc_heatmap.json
//   rpsobs replay   --log runs/hc/evaluations.jsonl
//   rpsobs serve    --port 8080
//   rpsobs catalog

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rpsobs/catalog.hpp"
#include "rpsobs/harness.hpp"
#include "rpsobs/json_io.hpp"
#include "rpsobs/service.hpp"

namespace fs = std::filesystem;
using namespace rpsobs;

namespace {

struct RunArgs {
  std::string config_file;
  std::string preset_name;
  std::string pair;
  std::optional<int> rounds;
  std::optional<int> warmup;
  std::optional<int> history_limit;
  std::optional<int> reasoning_interval;
  std::optional<std::string> observer;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  bool brier_halved = false;
  std::optional<std::string> llm_base_url;
  std::optional<std::string> llm_model;
  std::optional<std::string> llm_key_env;
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::string out;
  bool quiet = false;
};

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

MatchConfig build_config(const RunArgs& a) {
  MatchConfig cfg;
  if (!a.config_file.empty()) cfg = match_config_from_json(read_json_file(a.config_file));
  if (!a.preset_name.empty()) cfg = preset(a.preset_name);
  if (!a.pair.empty()) cfg.pair = StrategyPair::parse(a.pair);
  if (a.rounds) cfg.rounds = *a.rounds;
  if (a.warmup) cfg.warmup_rounds = *a.warmup;
  if (a.history_limit) cfg.history_limit = *a.history_limit;
  if (a.reasoning_interval) cfg.reasoning_interval = *a.reasoning_interval;
  if (a.observer) cfg.observer.kind = parse_observer_kind(*a.observer);
  if (a.seed) {
    cfg.seed = *a.seed;
    cfg.observer.seed = *a.seed;
  }
  if (a.alpha) cfg.solver.alpha = *a.alpha;
  if (a.brier_halved) cfg.metrics.brier_halved = true;
  if (a.llm_base_url) cfg.observer.llm.base_url = *a.llm_base_url;
  if (a.llm_model) cfg.observer.llm.model = *a.llm_model;
  if (a.llm_key_env) cfg.observer.llm.api_key_env = *a.llm_key_env;
  if (a.temperature) cfg.observer.llm.temperature = *a.temperature;
  if (a.top_p) cfg.observer.llm.top_p = *a.top_p;
  cfg.validate();
  return cfg;
}

void print_summary(const Summary& s, std::ostream& os) {
  auto line = [&](const char* name, const MeanStderr& m) {
    os << "  " << name << ": " << m.mean << " +/- " << m.std_error << '\n';
  };
  os << "evaluated " << s.evaluated << " rounds (" << s.failed << " failed)\n";
  line("union  ", s.union_loss);
  line("ce_norm", s.ce_norm);
  line("brier  ", s.brier);
  line("ev_norm", s.ev_norm);
  os << "  SIR    : " << s.sir << "%\n";
}

int cmd_run(const RunArgs& a) {
  const MatchConfig cfg = build_config(a);
  std::optional<std::ofstream> live;
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    live.emplace(fs::path(a.out) / "evaluations.jsonl");
  }
  MatchRunner runner(cfg);
  while (!runner.done()) {
    const RoundOutcome out = runner.step();
    if (const auto* ev = std::get_if<RoundEvaluation>(&out)) {
      if (live) *live << to_json(*ev).dump() << '\n';
      if (!a.quiet) {
        std::cerr << "round " << ev->round << " guess " << ev->guess.pair().str()
                  << " union " << ev->losses.union_loss << '\n';
      }
    } else {
      const auto& f = std::get<FailedRound>(out);
      if (live) *live << to_json(f).dump() << '\n';
      std::cerr << "round " << f.round << " failed: " << f.error << '\n';
    }
  }
  const ExperimentResult result = runner.result();
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    std::ofstream(dir / "config.json") << to_json(cfg).dump(2) << '\n';
    std::ofstream traj(dir / "trajectory.jsonl");
    write_trajectory_jsonl(result.trajectory, traj);
    std::ofstream(dir / "heatmap.json") << to_json(runner.grid()).dump() << '\n';
    std::ofstream reasoning(dir / "reasoning.jsonl");
    for (const auto& s : result.reasoning_snapshots) {
      reasoning << Json{{"round", s.round}, {"text", s.text}}.dump() << '\n';
    }
    if (!result.evaluations.empty()) {
      std::ofstream(dir / "summary.csv") << summary_csv(result.summary);
    }
  }
  std::cout << "pair " << cfg.pair.str() << ", truth (win " << result.truth.win
            << ", draw " << result.truth.draw << ", loss " << result.truth.loss
            << ")" << (result.truth_approximate ? " [approximate]" : "") << '\n';
  if (result.evaluations.empty()) {
    std::cerr << "no successful evaluations\n";
    return 2;
  }
  print_summary(result.summary, std::cout);
  return 0;
}

int cmd_heatmap(const std::string& pair_text, const std::string& out, bool brier_halved) {
  const StrategyPair pair = StrategyPair::parse(pair_text);
  MetricOptions opts;
  opts.brier_halved = brier_halved;
  const GroundTruth truth = ground_truth(pair);
  const HeatmapGrid grid = loss_grid(truth.dist, SolverConfig{}, opts);
  const bool csv = out.size() > 4 && out.substr(out.size() - 4) == ".csv";
  const std::string body = csv ? heatmap_csv(grid) : to_json(grid).dump(2) + "\n";
  if (out.empty()) {
    std::cout << body;
  } else {
    std::ofstream(out) << body;
    std::cout << "wrote " << grid.cells.size() << " cells to " << out << '\n';
  }
  return 0;
}

int cmd_replay(const std::string& log_path, const std::string& out) {
  std::ifstream in(log_path);
  if (!in) throw PreconditionError("cannot open " + log_path);
  std::size_t failed = 0;
  std::vector<RoundEvaluation> evals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = parse_json(line);
    if (j.contains("failed")) {
      ++failed;
      continue;
    }
    evals.push_back(round_evaluation_from_json(j));
  }
  const Summary s = summarize(evals, failed);
  if (!out.empty()) std::ofstream(out) << summary_csv(s);
  std::cout << "pair " << evals.front().truth_pair.str() << '\n';
  print_summary(s, std::cout);
  return 0;
}

HttpService* g_http = nullptr;

void on_signal(int) {
  if (g_http != nullptr) g_http->stop();
}

int cmd_serve(const std::string& host, int port, int round_delay_ms,
              const std::string& log_dir, const std::string& static_dir) {
  ServiceOptions opts;
  opts.round_delay = std::chrono::milliseconds(round_delay_ms);
  if (!log_dir.empty()) opts.log_dir = log_dir;
  MatchService service(opts);
  std::optional<fs::path> statics;
  if (!static_dir.empty()) statics = static_dir;
  HttpService http(service, statics);
  g_http = &http;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "serving on http://" << host << ':' << port << '\n';
  http.listen(host, port);
  g_http = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observer evaluation harness for repeated Rock-Paper-Scissors"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Play a match and score an observer");
  run_cmd->add_option("--config", run.config_file, "JSON file with MatchConfig fields");
  run_cmd->add_option("--preset", run.preset_name,
                      "static-dynamic | dynamic-dynamic | dynamic-psychological");
  run_cmd->add_option("--pair", run.pair, "Strategy pair, e.g. H-C");
  run_cmd->add_option("--rounds", run.rounds, "Rounds to play (default 200)");
  run_cmd->add_option("--warmup", run.warmup, "Rounds played before the first guess (default 10)");
  run_cmd->add_option("--history-limit", run.history_limit,
                      "Most recent rounds shown in the prompt (default 50)");
  run_cmd->add_option("--reasoning-interval", run.reasoning_interval,
                      "Snapshot reasoning every N rounds (default 20)");
  run_cmd->add_option("--observer", run.observer, "oracle | frequency | random | llm");
  run_cmd->add_option("--seed", run.seed, "Match seed; also seeds the random observer");
  run_cmd->add_option("--alpha", run.alpha, "Solver damping factor");
  run_cmd->add_flag("--brier-halved", run.brier_halved, "Normalize Brier by 2");
  run_cmd->add_option("--llm-base-url", run.llm_base_url, "Chat-completions base URL");
  run_cmd->add_option("--llm-model", run.llm_model, "Model name sent in the request");
  run_cmd->add_option("--llm-key-env", run.llm_key_env,
                      "Environment variable holding the API key");
  run_cmd->add_option("--temperature", run.temperature, "Sampling temperature (default 0.2)");
  run_cmd->add_option("--top-p", run.top_p, "Nucleus sampling mass (default 0.7)");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_flag("--quiet,-q", run.quiet, "Print only the summary");

  std::string hm_pair, hm_out;
  bool hm_halved = false;
  auto* hm_cmd = app.add_subcommand("heatmap", "Write the loss grid for a true pair");
  hm_cmd->add_option("--pair", hm_pair, "True strategy pair, e.g. N-G")->required();
  hm_cmd->add_option("--out", hm_out, "Output file (.json or .csv); stdout if omitted");
  hm_cmd->add_flag("--brier-halved", hm_halved, "Normalize Brier by 2");

  std::string replay_log, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "Summarize a JSONL evaluation log");
  replay_cmd->add_option("--log", replay_log, "evaluations.jsonl or a service event log")
      ->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--out", replay_out, "Write summary CSV here");

  std::string host = "127.0.0.1", log_dir, static_dir;
  int port = 8080, round_delay_ms = 100;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service for the dashboard");
  serve_cmd->add_option("--port", port, "Listen port (default 8080)");
  serve_cmd->add_option("--host", host, "Bind address (default 127.0.0.1)");
  serve_cmd->add_option("--round-delay-ms", round_delay_ms,
                        "Pause between rounds (default 100)");
  serve_cmd->add_option("--log-dir", log_dir, "Append per-match JSONL event logs here");
  serve_cmd->add_option("--static-dir", static_dir, "Serve dashboard files from here");

  auto* catalog_cmd = app.add_subcommand("catalog", "Print the strategy catalog as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*hm_cmd) return cmd_heatmap(hm_pair, hm_out, hm_halved);
    if (*replay_cmd) return cmd_replay(replay_log, replay_out);
    if (*serve_cmd) return cmd_serve(host, port, round_delay_ms, log_dir, static_dir);
    if (*catalog_cmd) {
      std::cout << catalog_json().dump(2) << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
