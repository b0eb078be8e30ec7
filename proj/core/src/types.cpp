#include "rpsobs/types.hpp"

#include <cmath>
#include <sstream>

namespace rpsobs {

Move move_from_index(int i) {
  if (i < 0 || i > 2) {
    throw ValidationError("move code must be 0, 1 or 2, got " +
                          std::to_string(i));
  }
  return static_cast<Move>(i);
}

std::string_view move_name(Move m) {
  switch (m) {
    case Move::Rock:
      return "Rock";
    case Move::Paper:
      return "Paper";
    case Move::Scissors:
      return "Scissors";
  }
  return "?";
}

MoveDist MoveDist::point(Move m) {
  MoveDist d(0.0, 0.0, 0.0);
  d[m] = 1.0;
  return d;
}

namespace {

bool simplex3(const std::array<double, 3>& p) {
  double sum = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0) return false;
    sum += x;
  }
  return std::abs(sum - 1.0) <= kSimplexTolerance;
}

std::string describe(std::string_view what, const std::array<double, 3>& p) {
  std::ostringstream os;
  os.precision(17);
  os << what << " is not on the simplex: (" << p[0] << ", " << p[1] << ", "
     << p[2] << ")";
  return os.str();
}

}  // namespace

bool MoveDist::valid() const { return simplex3(p); }

void MoveDist::validate(std::string_view what) const {
  if (!valid()) throw PreconditionError(describe(what, p));
}

double l1_distance(const MoveDist& a, const MoveDist& b) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) d += std::abs(a.p[i] - b.p[i]);
  return d;
}

bool OutcomeDist::valid() const { return simplex3(as_array()); }

void OutcomeDist::validate(std::string_view what) const {
  if (!valid()) throw PreconditionError(describe(what, as_array()));
}

}  // namespace rpsobs
