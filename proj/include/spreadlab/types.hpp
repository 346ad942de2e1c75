#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace spreadlab {

using NodeId = std::int32_t;
using Day = std::int32_t;

// Coordinate order of every probability vector is (I, L, R, S).
enum class State : std::uint8_t { I = 0, L = 1, R = 2, S = 3 };

inline constexpr std::array<State, 4> kAllStates{State::I, State::L, State::R, State::S};

constexpr std::size_t index_of(State s) { return static_cast<std::size_t>(s); }

char state_char(State s);

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InconsistentEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnumerationTooWide : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProbVector {
  std::array<double, 4> p{0.0, 0.0, 0.0, 1.0};

  static ProbVector one_hot(State s);
  static ProbVector uniform();

  double operator[](State s) const { return p[index_of(s)]; }
  double& operator[](State s) { return p[index_of(s)]; }
  double I() const { return p[0]; }
  double L() const { return p[1]; }
  double R() const { return p[2]; }
  double S() const { return p[3]; }

  double sum() const { return p[0] + p[1] + p[2] + p[3]; }
  bool operator==(const ProbVector&) const = default;
};

// Entries whose share of the total is below this are clamped to zero.
inline constexpr double kClampBelow = 1e-15;

// Rescales to unit mass and clamps tiny shares; returns false without mass.
bool normalize(ProbVector& v);

double l1_distance(const ProbVector& a, const ProbVector& b);
double squared_distance(const ProbVector& a, const ProbVector& b);

}  // namespace spreadlab
