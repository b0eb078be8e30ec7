#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rpsobs/catalog.hpp"
#include "rpsobs/types.hpp"

namespace rpsobs {

// Portable random stream: std::mt19937_64 (whose output sequence is fixed by
// the standard) mapped to doubles as (x >> 11) * 2^-53. Standard library
// distributions are avoided because their output is implementation-defined.
class MoveRng {
 public:
  explicit MoveRng(std::uint64_t seed) : engine_(seed) {}

  // Seed for player `player` (1 or 2) of a match seeded with `match_seed`:
  // splitmix64(match_seed + player * 0x9E3779B97F4A7C15).
  static std::uint64_t stream_seed(std::uint64_t match_seed, int player);
  static MoveRng for_player(std::uint64_t match_seed, int player) {
    return MoveRng(stream_seed(match_seed, player));
  }

  // Uniform in [0, 1).
  double next_unit();
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Inverse-CDF draw in Rock, Paper, Scissors order.
Move sample_move(const MoveDist& dist, MoveRng& rng);

// +1 if m1 beats m2, 0 on a draw, -1 otherwise.
int resolve_round(Move m1, Move m2);

struct RoundRecord {
  int round = 0;  // 1-based
  Move move1 = Move::Rock;
  Move move2 = Move::Rock;
  int result = 0;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct Trajectory {
  StrategyPair pair{StrategyKey('A'), StrategyKey('A')};
  std::uint64_t seed = 0;
  std::vector<RoundRecord> rounds;
};

// Static and mixture players sample their catalog distribution each round.
// Reactive players apply their rule to a point mass on the opponent's
// previous move; in round 1 they play uniformly at random.
Trajectory play_match(const StrategyPair& pair, int n_rounds,
                      std::uint64_t seed);

// One {"round","move1","move2","result"} object per line.
void write_trajectory_jsonl(const Trajectory& t, std::ostream& out);
std::vector<RoundRecord> read_rounds_jsonl(std::istream& in);

}  // namespace rpsobs
