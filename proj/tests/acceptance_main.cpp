// Acceptance suite: one PASS/FAIL line per criterion, each with a wall-clock
// budget. Expected values come from the hand-written oracles in oracles.hpp
// and from catalog rows restated here, never from the library under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rpsobs/engine.hpp"
#include "rpsobs/harness.hpp"
#include "rpsobs/metrics.hpp"
#include "rpsobs/observer.hpp"
#include "rpsobs/solver.hpp"

#ifndef RPSOBS_FIXTURE_DIR
#error "RPSOBS_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace {

using namespace rpsobs;

struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream os;
    os.precision(12);
    os << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::abs(got - want) <= tol, os.str());
  }
};

struct Criterion {
  const char* id;
  const char* title;
  double budget_s;
  std::function<void(Check&)> body;
};

// Non-reactive rows as printed in the strategy table.
const std::pair<char, oracle::Vec3> kRows[] = {
    {'A', {0, 0, 1}},         {'B', {1, 0, 0}},         {'C', {0, 1, 0}},
    {'D', {0.333, 0.333, 0.334}}, {'E', {0.50, 0.50, 0}},   {'F', {0.50, 0, 0.50}},
    {'G', {0, 0.50, 0.50}},   {'H', {0.50, 0.25, 0.25}}, {'I', {0.25, 0.50, 0.25}},
    {'J', {0.25, 0.25, 0.50}}, {'K', {0.50, 0.333, 0.167}}, {'L', {0.50, 0.167, 0.333}},
    {'M', {0.333, 0.50, 0.167}}, {'N', {0.167, 0.50, 0.333}}, {'O', {0.333, 0.167, 0.50}},
    {'P', {0.167, 0.333, 0.50}},
};

const std::pair<char, const int (*)[3]> kReactive[] = {
    {'X', &oracle::kYield}, {'Y', &oracle::kCounter}, {'Z', &oracle::kCopy}};

StrategyPair pair_of(char a, char b) { return {StrategyKey(a), StrategyKey(b)}; }

oracle::Vec3 empirical_outcomes(const Trajectory& t) {
  oracle::Vec3 f{0, 0, 0};
  for (const auto& r : t.rounds) f[r.result == 1 ? 0 : r.result == 0 ? 1 : 2] += 1;
  for (double& x : f) x /= static_cast<double>(t.rounds.size());
  return f;
}

void solver_closed_forms(Check& c) {
  const auto hc = ground_truth(pair_of('H', 'C')).dist;
  const auto hc_want = oracle::outcome({0.50, 0.25, 0.25}, {0, 1, 0});
  const auto ng = ground_truth(pair_of('N', 'G')).dist;
  const auto ng_want = oracle::outcome({0.167, 0.50, 0.333}, {0, 0.50, 0.50});
  const char* names[] = {"win", "draw", "loss"};
  for (int k = 0; k < 3; ++k) {
    c.near(hc.as_array()[k], hc_want[k], 1e-9, std::string("H-C ") + names[k]);
    c.near(ng.as_array()[k], ng_want[k], 1e-9, std::string("N-G ") + names[k]);
  }
  c.near(hc.win, 0.25, 1e-9, "H-C win literal");
  c.near(hc.draw, 0.25, 1e-9, "H-C draw literal");
  c.near(hc.loss, 0.50, 1e-9, "H-C loss literal");
  c.near(ng.win, 0.25, 1e-9, "N-G win literal");
  c.near(ng.draw, 0.4165, 1e-9, "N-G draw literal");
  c.near(ng.loss, 0.3335, 1e-9, "N-G loss literal");
}

void convergence(Check& c) {
  const SolverConfig cfg{0.5, 1e-4, 10'000};
  int pairs = 0;
  for (const auto& a : catalog()) {
    for (const auto& b : catalog()) {
      ++pairs;
      const auto st = steady_state(StrategyPair{a.key, b.key}, cfg);
      const std::string name = StrategyPair{a.key, b.key}.str();
      c.expect(st.converged, name + " did not converge");
      c.expect(st.residual < 1e-4, name + " residual too large");
      c.expect(st.iterations <= 10'000, name + " exceeded iteration cap");
      if (!a.is_reactive() && !b.is_reactive()) {
        c.expect(st.iterations == 0, name + " static pair iterated");
      }
    }
  }
  c.expect(pairs == 361, "expected 361 ordered pairs");
}

void engine_solver_agreement(Check& c) {
  constexpr int kRounds = 100'000;
  std::uint64_t seed = 1;
  auto compare = [&](char a, char b, const oracle::Vec3& want) {
    const auto f = empirical_outcomes(play_match(pair_of(a, b), kRounds, seed++));
    const auto lib = ground_truth(pair_of(a, b)).dist.as_array();
    const std::string name = std::string{a, '-', b};
    for (int k = 0; k < 3; ++k) {
      c.near(f[k], want[k], 0.01, name + " empirical vs oracle");
      c.near(f[k], lib[k], 0.01, name + " empirical vs solver");
    }
  };
  for (const auto& [a, ra] : kRows) {
    for (const auto& [b, rb] : kRows) compare(a, b, oracle::outcome(ra, rb));
  }
  // A reactive player facing an i.i.d. opponent answers a fresh draw each
  // round, so its marginal is the permuted opponent row.
  for (const auto& [r, table] : kReactive) {
    for (const auto& [s, row] : kRows) {
      const auto reply = oracle::permute(*table, row);
      compare(r, s, oracle::outcome(reply, row));
      compare(s, r, oracle::outcome(row, reply));
    }
  }
}

void metric_bounds(Check& c) {
  std::mt19937_64 gen(2718);
  std::exponential_distribution<double> e(1.0);
  auto draw = [&] {
    const double a = e(gen), b = e(gen), d = e(gen), s = a + b + d;
    return OutcomeDist{a / s, b / s, 1.0 - a / s - b / s};
  };
  for (int i = 0; i < 1000; ++i) {
    const OutcomeDist t = draw(), g = draw();
    c.expect(cross_entropy(t, g) >= cross_entropy(t, t) - 1e-9, "Gibbs inequality");
    const double b = brier(t, g);
    c.expect(b >= 0.0 && b <= 2.0, "Brier outside [0, 2]");
    const double ev = ev_loss(t, g);
    c.expect(ev >= 0.0 && ev <= 4.0, "EVLoss outside [0, 4]");
  }
  c.near(ev_loss({1, 0, 0}, {0, 0, 1}), 4.0, 0.0, "EVLoss upper bound");
  std::vector<std::pair<StrategyPair, OutcomeDist>> flat;
  for (const auto& s : catalog()) {
    for (const auto& t : catalog()) flat.emplace_back(StrategyPair{s.key, t.key}, OutcomeDist{0.2, 0.3, 0.5});
  }
  const HeatmapGrid g = loss_grid(OutcomeDist{0.4, 0.4, 0.2}, flat);
  c.near(union_loss(g.truth, {0.2, 0.3, 0.5}, g).ce_norm, 0.5, 0.0, "degenerate ce_norm");
}

void oracle_experiment(Check& c) {
  MatchConfig cfg = preset("static-dynamic");
  cfg.observer.kind = ObserverKind::Oracle;
  const ExperimentResult r = run_experiment(cfg);
  c.expect(r.evaluations.size() == 190, "expected 190 evaluations");
  c.near(r.summary.sir, 100.0, 0.0, "SIR");
  const double h = oracle::entropy({0.25, 0.25, 0.50});
  c.near(h, 1.03972, 1e-5, "entropy anchor");
  for (const auto& e : r.evaluations) {
    const std::string at = " at round " + std::to_string(e.round);
    c.near(e.losses.brier, 0.0, 0.0, "brier" + at);
    c.near(e.losses.ev_loss, 0.0, 0.0, "ev_loss" + at);
    c.near(e.losses.ce, h, 1e-6, "ce" + at);
    c.near(e.losses.ce_norm, 0.0, 0.0, "ce_norm" + at);
  }
}

void sir_arithmetic(Check& c) {
  GuessLog log;
  for (int r = 1; r <= 200; ++r) {
    log.append({r, StrategyKey('H'), StrategyKey(r <= 115 ? 'C' : 'Y'), 0.7});
  }
  c.near(sir(log, pair_of('H', 'C')), 57.5, 0.0, "SIR 115/200");
}

void prompt_golden(Check& c) {
  PromptSpec spec;
  spec.history = {{1, Move::Scissors, Move::Paper, 1},
                  {2, Move::Rock, Move::Paper, -1},
                  {3, Move::Rock, Move::Paper, -1}};
  std::ifstream in(std::string(RPSOBS_FIXTURE_DIR) + "/prompt_3round.txt");
  std::stringstream golden;
  golden << in.rdbuf();
  const std::string p = build_prompt(spec);
  c.expect(!golden.str().empty(), "golden fixture missing");
  c.expect(p == golden.str(), "prompt bytes differ from golden fixture");
  c.expect(p.find("Respond with JSON only.") != std::string::npos, "role line missing");
  c.expect(p.find("0=Rock, 1=Paper, 2=Scissors") != std::string::npos, "encoding line missing");

  PromptSpec longer;
  longer.history = play_match(pair_of('H', 'C'), 60, 3).rounds;
  longer.history_limit = 50;
  const std::string q = build_prompt(longer);
  std::size_t n = 0;
  for (auto pos = q.find("{\"round\": "); pos != std::string::npos; pos = q.find("{\"round\": ", pos + 1)) ++n;
  c.expect(n == 50, "truncated history should hold 50 rounds");
  c.expect(q.find("[{\"round\": 11,") != std::string::npos, "window should start at round 11");
  c.expect(q.find("{\"round\": 10,") == std::string::npos, "round 10 should be dropped");
}

void permutation(Check& c) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 0.4);
  std::vector<double> same(190);
  for (double& x : same) x = u(gen);
  const double p_same = permutation_test(same, same, 10'000);
  c.expect(p_same >= 0.3, "identical series p = " + std::to_string(p_same));
  std::vector<double> lo(190), hi(190);
  for (std::size_t i = 0; i < 190; ++i) {
    lo[i] = u(gen) * 0.1;
    hi[i] = lo[i] + 0.2;
  }
  const double p_sep = permutation_test(lo, hi, 10'000);
  c.expect(p_sep <= 0.001, "separated series p = " + std::to_string(p_sep));
}

void frequency_sanity(Check& c) {
  MatchConfig cfg = preset("static-dynamic");
  cfg.rounds = 5200;
  cfg.warmup_rounds = 5000;
  cfg.observer.kind = ObserverKind::Frequency;
  cfg.seed = 20250101;
  const ExperimentResult r = run_experiment(cfg);
  c.expect(r.evaluations.size() == 200, "expected 200 evaluations");
  c.expect(r.summary.sir >= 99.0, "per-round identification rate " + std::to_string(r.summary.sir));
}

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"solver-closed-forms", "H-C and N-G ground truth within 1e-9", 1.0, solver_closed_forms},
      {"solver-convergence", "all 361 pairs converge at alpha 0.5, tol 1e-4", 10.0, convergence},
      {"engine-solver-agreement", "100k-round simulations within 0.01", 120.0,
       engine_solver_agreement},
      {"metric-bounds", "Gibbs, Brier, EVLoss bounds; EVLoss max 4; degenerate CE 0.5", 5.0,
       metric_bounds},
      {"oracle-experiment", "H-C oracle: 190 rounds, SIR 100, zero loss", 5.0, oracle_experiment},
      {"sir-arithmetic", "115 of 200 correct gives 57.5", 1.0, sir_arithmetic},
      {"prompt-golden", "3-round prompt matches fixture; history limit 50", 1.0, prompt_golden},
      {"permutation-test", "identical p >= 0.3; 0.2 gap p <= 0.001", 10.0, permutation},
      {"frequency-observer", "H-C after 5000 warm rounds identified >= 99%", 30.0,
       frequency_sanity},
  };

  int failed = 0;
  for (const Criterion& cr : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget_s) {
      check.failures.push_back("took " + std::to_string(secs) + " s, budget " +
                               std::to_string(cr.budget_s) + " s");
    }
    const bool ok = check.failures.empty();
    failed += !ok;
    std::printf("%s  %-24s %-62s %8.3f s (budget %.0f s)\n", ok ? "PASS" : "FAIL", cr.id,
                cr.title, secs, cr.budget_s);
    for (const auto& f : check.failures) std::printf("        %s\n", f.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
