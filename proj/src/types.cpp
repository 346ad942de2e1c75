#include "spreadlab/types.hpp"

#include <cmath>

namespace spreadlab {

char state_char(State s) {
  switch (s) {
    case State::I: return 'I';
    case State::L: return 'L';
    case State::R: return 'R';
    case State::S: return 'S';
  }
  return '?';
}

ParseError::ParseError(const std::string& what, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

ProbVector ProbVector::one_hot(State s) {
  ProbVector v;
  v.p = {0.0, 0.0, 0.0, 0.0};
  v[s] = 1.0;
  return v;
}

ProbVector ProbVector::uniform() {
  ProbVector v;
  v.p = {0.25, 0.25, 0.25, 0.25};
  return v;
}

bool normalize(ProbVector& v) {
  double total = 0.0;
  for (double x : v.p) total += x;
  if (!(total > 0.0) || !std::isfinite(total)) return false;
  // Relative clamp: unnormalized likelihood products may be tiny but meaningful.
  double kept = 0.0;
  for (double& x : v.p) {
    x /= total;
    if (x < kClampBelow) x = 0.0;
    kept += x;
  }
  for (double& x : v.p) x /= kept;
  return true;
}

double l1_distance(const ProbVector& a, const ProbVector& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) d += std::abs(a.p[k] - b.p[k]);
  return d;
}

double squared_distance(const ProbVector& a, const ProbVector& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < 4; ++k) d += (a.p[k] - b.p[k]) * (a.p[k] - b.p[k]);
  return d;
}

}  // namespace spreadlab
