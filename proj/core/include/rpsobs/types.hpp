#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace rpsobs {

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnknownKeyError : public Error {
 public:
  using Error::Error;
};

// Reply-handling errors keep the offending text for audit logs.
class ReplyError : public Error {
 public:
  explicit ReplyError(const std::string& what, std::string raw = {})
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class ParseError : public ReplyError {
 public:
  using ReplyError::ReplyError;
};

class ValidationError : public ReplyError {
 public:
  using ReplyError::ReplyError;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// Wire encoding 0=Rock, 1=Paper, 2=Scissors.
enum class Move : std::uint8_t { Rock = 0, Paper = 1, Scissors = 2 };

inline constexpr std::array<Move, 3> kAllMoves = {Move::Rock, Move::Paper,
                                                  Move::Scissors};

constexpr int to_index(Move m) { return static_cast<int>(m); }

Move move_from_index(int i);

// The move that defeats m.
constexpr Move beats(Move m) {
  return static_cast<Move>((to_index(m) + 1) % 3);
}

// The move that m defeats.
constexpr Move loses_to(Move m) {
  return static_cast<Move>((to_index(m) + 2) % 3);
}

std::string_view move_name(Move m);

inline constexpr double kSimplexTolerance = 1e-9;

// Probability vector over {Rock, Paper, Scissors}.
struct MoveDist {
  std::array<double, 3> p{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  constexpr MoveDist() = default;
  constexpr MoveDist(double rock, double paper, double scissors)
      : p{rock, paper, scissors} {}

  static constexpr MoveDist uniform() { return MoveDist{}; }
  static MoveDist point(Move m);

  double operator[](Move m) const { return p[to_index(m)]; }
  double& operator[](Move m) { return p[to_index(m)]; }

  double rock() const { return p[0]; }
  double paper() const { return p[1]; }
  double scissors() const { return p[2]; }

  bool valid() const;
  // Throws PreconditionError unless valid().
  void validate(std::string_view what = "move distribution") const;

  friend bool operator==(const MoveDist&, const MoveDist&) = default;
};

double l1_distance(const MoveDist& a, const MoveDist& b);

// (win, draw, loss) from Player 1's perspective.
struct OutcomeDist {
  double win = 0.0;
  double draw = 0.0;
  double loss = 0.0;

  std::array<double, 3> as_array() const { return {win, draw, loss}; }

  bool valid() const;
  void validate(std::string_view what = "outcome distribution") const;

  friend bool operator==(const OutcomeDist&, const OutcomeDist&) = default;
};

}  // namespace rpsobs
