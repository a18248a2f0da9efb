#pragma once

#include "miblp/rational.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace miblp {

/// Mixed-integer bilevel linear instance in value-function form.
///
/// Leader variables x (n1, the first r1 integer), follower variables y (n2, the
/// first r2 integer). After normalization every constraint row reads
///   A·x + G·y >= b
/// and is stored in the upper (leader) or lower (follower) block. The follower's
/// problem at x is  min d2·y  s.t.  G2·y >= b2 - A2·x,  y within its bounds,
/// y integer on the first r2 entries.
struct MiblpInstance {
  int n1 = 0;
  int r1 = 0;
  int n2 = 0;
  int r2 = 0;

  RationalVector c;   // n1
  RationalVector d1;  // n2
  RationalVector d2;  // n2

  RationalMatrix A1, G1;  // m1 x n1, m1 x n2
  RationalVector b1;
  RationalMatrix A2, G2;  // m2 x n1, m2 x n2
  RationalVector b2;

  /// Bounds for (x, y) stacked; an empty optional upper bound means +inf
  /// (only before finalize_bounds).
  RationalVector lower;
  std::vector<std::optional<Rational>> upper;

  int m1() const { return static_cast<int>(b1.size()); }
  int m2() const { return static_cast<int>(b2.size()); }
  int num_vars() const { return n1 + n2; }
  bool leader_is_integer(int j) const { return j < r1; }
  bool follower_is_integer(int j) const { return j < r2; }
  bool pure_integer() const { return r1 == n1 && r2 == n2; }
  bool has_finite_bounds() const;

  /// A leader variable is linking when its column in A2 has a nonzero entry.
  bool is_linking(int j) const;

  double lower_d(int var) const { return to_double(lower[var]); }
  double upper_d(int var) const;

  /// Throws std::invalid_argument on any dimension inconsistency.
  void check_dimensions() const;

  friend bool operator==(const MiblpInstance&, const MiblpInstance&) = default;
};

/// Solver-side point: leader and follower parts in floating point.
struct Point {
  std::vector<double> x;
  std::vector<double> y;

  std::vector<double> stacked() const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

enum class RowSense { GreaterEqual, LessEqual, Equal };

/// A constraint row as written in a file, before normalization.
struct RawRow {
  RationalVector coefficients;  // n1 + n2
  RowSense sense = RowSense::GreaterEqual;
  Rational rhs;
};

/// ">=" rows pass through, "<=" rows are negated, "=" rows become two ">=" rows.
std::vector<RawRow> normalize_rows(const std::vector<RawRow>& rows);

bool satisfies(const RawRow& row, const RationalVector& point);

MiblpInstance parse_instance(std::istream& in);
MiblpInstance parse_instance_string(const std::string& text);
MiblpInstance read_instance_file(const std::string& path);

void write_instance(std::ostream& out, const MiblpInstance& inst);
std::string write_instance_string(const MiblpInstance& inst);

struct ValidationReport {
  bool bounded = false;          // Assumption 1
  bool linking_integer = false;  // Assumption 2
  bool data_integral = false;    // Assumption 3 (sufficient form)
  bool lp_feasible = false;      // P nonempty
  std::vector<double> var_min;   // extrema over P, n1 + n2 (empty when P is empty/unbounded)
  std::vector<double> var_max;
  std::vector<std::string> messages;

  bool solvable() const { return bounded && linking_integer; }
};

/// Sufficient form of the integrality assumption: A2, G2, b2, d2 integer and
/// continuous follower variables absent from G2 and d2.
bool integrality_guaranteed(const MiblpInstance& inst);

/// Runs the boundedness LPs (2(n1+n2) of them) and the data checks. Infinite
/// upper bounds are tolerated here; boundedness is decided by the rows.
ValidationReport validate_assumptions(const MiblpInstance& inst);

/// Replaces infinite upper bounds by LP extrema: leader variables by the
/// maximum over P, follower variables by the maximum over the follower region
/// {A2 x + G2 y >= b2, bounds}. Integer variables are floored. Throws
/// std::runtime_error when a required maximum is unbounded.
MiblpInstance finalize_bounds(MiblpInstance inst);

/// parse + finalize_bounds.
MiblpInstance load_instance(const std::string& path);

struct GeneratorParams {
  int n1 = 2;
  int n2 = 2;
  int m1 = 1;
  int m2 = 3;
  int coeff_lo = -5;
  int coeff_hi = 5;
  int bound = 5;
};

class GenerationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pure-integer random instance with box [0, bound]. Leader rows only involve
/// leader variables. Deterministic for a fixed seed.
MiblpInstance generate_random_instance(std::uint64_t seed, const GeneratorParams& params);

/// Parameters of the seeded verification suite member `seed` (at most 4
/// variables per level, bounds at most 5, at most 4 follower rows).
GeneratorParams suite_params(std::uint64_t seed);
MiblpInstance suite_instance(std::uint64_t seed);

}  // namespace miblp
