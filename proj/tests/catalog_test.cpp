#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "rpsobs/catalog.hpp"

namespace rpsobs {
namespace {

MoveDist random_simplex(std::mt19937_64& gen) {
  std::exponential_distribution<double> e(1.0);
  double a = e(gen), b = e(gen), c = e(gen);
  const double s = a + b + c;
  a /= s;
  b /= s;
  return MoveDist(a, b, 1.0 - a - b);
}

oracle::Vec3 vec(const MoveDist& d) { return {d.rock(), d.paper(), d.scissors()}; }

TEST(MoveTest, BeatsAndLosesToArePermutations) {
  EXPECT_EQ(beats(Move::Rock), Move::Paper);
  EXPECT_EQ(beats(Move::Paper), Move::Scissors);
  EXPECT_EQ(beats(Move::Scissors), Move::Rock);
  for (Move m : kAllMoves) {
    EXPECT_EQ(loses_to(beats(m)), m);
    EXPECT_EQ(beats(loses_to(m)), m);
  }
  EXPECT_THROW(move_from_index(3), ValidationError);
}

TEST(CatalogTest, GetStrategy) {
  const StrategySpec& c = get_strategy('C');
  EXPECT_EQ(c.kind, StrategyKind::Static);
  EXPECT_EQ(*c.dist, MoveDist(0, 1, 0));

  const StrategySpec& h = get_strategy('H');
  EXPECT_EQ(h.kind, StrategyKind::Mixture);
  EXPECT_EQ(*h.dist, MoveDist(0.50, 0.25, 0.25));
  EXPECT_EQ(h.name, "Rock Biased");

  EXPECT_THROW(get_strategy('Q'), UnknownKeyError);
  EXPECT_THROW(get_strategy('a'), UnknownKeyError);
  EXPECT_THROW(StrategyKey::parse("HC"), UnknownKeyError);
}

TEST(CatalogTest, CompositionAndRows) {
  int statics = 0, mixtures = 0, reactives = 0;
  std::set<char> keys;
  for (const StrategySpec& s : catalog()) {
    keys.insert(s.key.code());
    switch (s.kind) {
      case StrategyKind::Static:
        ++statics;
        ASSERT_TRUE(s.dist);
        EXPECT_NEAR(std::max({s.dist->rock(), s.dist->paper(), s.dist->scissors()}), 1.0, 0);
        break;
      case StrategyKind::Mixture:
        ++mixtures;
        ASSERT_TRUE(s.dist);
        EXPECT_TRUE(s.dist->valid()) << s.key.code();
        break;
      case StrategyKind::Reactive:
        ++reactives;
        EXPECT_FALSE(s.dist);
        EXPECT_TRUE(s.rule);
        break;
    }
  }
  EXPECT_EQ(statics, 3);
  EXPECT_EQ(mixtures, 13);
  EXPECT_EQ(reactives, 3);
  EXPECT_EQ(keys.size(), 19u);

  // Three-decimal rows are kept as printed.
  EXPECT_EQ(*get_strategy('D').dist, MoveDist(0.333, 0.333, 0.334));
  EXPECT_EQ(*get_strategy('N').dist, MoveDist(0.167, 0.50, 0.333));
  EXPECT_EQ(*get_strategy('K').dist, MoveDist(0.50, 0.333, 0.167));
  EXPECT_EQ(*get_strategy('A').dist, MoveDist(0, 0, 1));
  EXPECT_EQ(*get_strategy('X').rule, ReactiveRule::WinLast);
  EXPECT_EQ(*get_strategy('Y').rule, ReactiveRule::LoseLast);
  EXPECT_EQ(*get_strategy('Z').rule, ReactiveRule::CopyLast);
}

TEST(ReactiveMapTest, Examples) {
  EXPECT_EQ(reactive_update_map(ReactiveRule::CopyLast, MoveDist(0.2, 0.3, 0.5)),
            MoveDist(0.2, 0.3, 0.5));
  EXPECT_EQ(reactive_update_map(ReactiveRule::LoseLast, MoveDist(1, 0, 0)),
            MoveDist(0, 1, 0));
  EXPECT_EQ(reactive_update_map(ReactiveRule::WinLast, MoveDist(1, 0, 0)),
            MoveDist(0, 0, 1));
  EXPECT_THROW(reactive_update_map(ReactiveRule::CopyLast, MoveDist(0.5, 0.3, 0.1)),
               PreconditionError);
}

TEST(ReactiveMapTest, MatchesHandWrittenPermutations) {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 200; ++i) {
    const MoveDist s = random_simplex(gen);
    const auto check = [&](ReactiveRule r, const int (&table)[3]) {
      const auto want = oracle::permute(table, vec(s));
      const auto got = vec(reactive_update_map(r, s));
      for (int k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(got[k], want[k]);
    };
    check(ReactiveRule::CopyLast, oracle::kCopy);
    check(ReactiveRule::LoseLast, oracle::kCounter);
    check(ReactiveRule::WinLast, oracle::kYield);
  }
}

TEST(ReactiveMapTest, SimplexLinearityAndCyclicOrder) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const MoveDist a = random_simplex(gen);
    const MoveDist b = random_simplex(gen);
    const double lambda = unit(gen);
    MoveDist mix;
    for (int k = 0; k < 3; ++k) mix.p[k] = lambda * a.p[k] + (1 - lambda) * b.p[k];
    for (ReactiveRule r :
         {ReactiveRule::WinLast, ReactiveRule::LoseLast, ReactiveRule::CopyLast}) {
      const MoveDist ga = reactive_update_map(r, a);
      const MoveDist gb = reactive_update_map(r, b);
      const MoveDist gm = reactive_update_map(r, mix);
      EXPECT_TRUE(ga.valid());
      for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(gm.p[k], lambda * ga.p[k] + (1 - lambda) * gb.p[k], 1e-12);
      }
    }
    for (ReactiveRule r : {ReactiveRule::WinLast, ReactiveRule::LoseLast}) {
      const MoveDist thrice =
          reactive_update_map(r, reactive_update_map(r, reactive_update_map(r, a)));
      EXPECT_EQ(thrice, a);
      EXPECT_NE(reactive_update_map(r, MoveDist(1, 0, 0)), MoveDist(1, 0, 0));
    }
  }
}

TEST(CatalogPromptTest, BlockContents) {
  const std::string block = catalog_prompt_block();
  EXPECT_EQ(block, catalog_prompt_block());
  EXPECT_NE(block.find("\"A\": {\n    \"type\": \"static\",\n    \"name\": \"A (Pure Scissors)\",\n"
                       "    \"dist\": {\"rock\": 0, \"paper\": 0, \"scissors\": 1}}"),
            std::string::npos);
  EXPECT_NE(block.find("\"Z\": {\n    \"type\": \"dynamic\",\n    \"name\": \"Z\",\n"
                       "    \"rule\": \"Play the same move as the opponent's previous move"),
            std::string::npos);
  EXPECT_NE(block.find("\"dist\": {\"rock\": 0.333, \"paper\": 0.333, \"scissors\": 0.334}"),
            std::string::npos);
  EXPECT_EQ(block.front(), '{');
  EXPECT_EQ(block.back(), '}');
  // The block itself is valid JSON with the same content as catalog_json().
  EXPECT_EQ(nlohmann::ordered_json::parse(block), catalog_json());
}

TEST(CatalogPromptTest, JsonExportFields) {
  const auto doc = catalog_json();
  ASSERT_EQ(doc.size(), 19u);
  EXPECT_EQ(doc["A"]["dist"]["scissors"], 1);
  EXPECT_EQ(doc["H"]["name"], "H (Rock Biased)");
  EXPECT_EQ(doc["Y"]["type"], "dynamic");
  EXPECT_FALSE(doc["Y"].contains("dist"));
  EXPECT_TRUE(doc["X"].contains("rule"));
}

TEST(StrategyPairTest, Parse) {
  EXPECT_EQ(StrategyPair::parse("H-C"), (StrategyPair{StrategyKey('H'), StrategyKey('C')}));
  EXPECT_EQ(StrategyPair::parse("NG").str(), "N-G");
  EXPECT_EQ(StrategyPair::parse("D,Y").str(), "D-Y");
  EXPECT_THROW(StrategyPair::parse("H"), UnknownKeyError);
  EXPECT_THROW(StrategyPair::parse("H-Q"), UnknownKeyError);
}

}  // namespace
}  // namespace rpsobs
