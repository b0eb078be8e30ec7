#include "rpsobs/engine.hpp"

#include <istream>
#include <ostream>

#include "rpsobs/json_io.hpp"

namespace rpsobs {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t MoveRng::stream_seed(std::uint64_t match_seed, int player) {
  return splitmix64(match_seed +
                    static_cast<std::uint64_t>(player) * 0x9E3779B97F4A7C15ULL);
}

double MoveRng::next_unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Move sample_move(const MoveDist& dist, MoveRng& rng) {
  dist.validate();
  const double u = rng.next_unit();
  if (u < dist.rock()) return Move::Rock;
  if (u < dist.rock() + dist.paper()) return Move::Paper;
  // Guard against the last bucket being empty when the sum is 1 - tiny.
  if (dist.scissors() == 0.0) {
    return dist.paper() > 0.0 ? Move::Paper : Move::Rock;
  }
  return Move::Scissors;
}

int resolve_round(Move m1, Move m2) {
  if (m1 == m2) return 0;
  return loses_to(m1) == m2 ? 1 : -1;
}

namespace {

class Player {
 public:
  Player(const StrategySpec& spec, MoveRng rng)
      : spec_(spec), rng_(std::move(rng)) {}

  Move next(const Move* opponent_last) {
    if (!spec_.is_reactive()) return sample_move(*spec_.dist, rng_);
    if (opponent_last == nullptr) return sample_move(MoveDist::uniform(), rng_);
    const MoveDist d =
        reactive_update_map(*spec_.rule, MoveDist::point(*opponent_last));
    return sample_move(d, rng_);
  }

 private:
  const StrategySpec& spec_;
  MoveRng rng_;
};

}  // namespace

Trajectory play_match(const StrategyPair& pair, int n_rounds,
                      std::uint64_t seed) {
  if (n_rounds < 1) throw PreconditionError("n_rounds must be >= 1");
  Player p1(get_strategy(pair.p1), MoveRng::for_player(seed, 1));
  Player p2(get_strategy(pair.p2), MoveRng::for_player(seed, 2));

  Trajectory t{pair, seed, {}};
  t.rounds.reserve(static_cast<std::size_t>(n_rounds));
  for (int r = 1; r <= n_rounds; ++r) {
    const RoundRecord* prev = t.rounds.empty() ? nullptr : &t.rounds.back();
    const Move m1 = p1.next(prev ? &prev->move2 : nullptr);
    const Move m2 = p2.next(prev ? &prev->move1 : nullptr);
    t.rounds.push_back(RoundRecord{r, m1, m2, resolve_round(m1, m2)});
  }
  return t;
}

void write_trajectory_jsonl(const Trajectory& t, std::ostream& out) {
  for (const RoundRecord& r : t.rounds) out << to_json(r).dump() << '\n';
}

std::vector<RoundRecord> read_rounds_jsonl(std::istream& in) {
  std::vector<RoundRecord> rounds;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rounds.push_back(round_record_from_json(parse_json(line)));
  }
  return rounds;
}

}  // namespace rpsobs
