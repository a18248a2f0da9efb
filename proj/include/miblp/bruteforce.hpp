#pragma once

#include "miblp/instance.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace miblp {

inline constexpr long long kEnumerationBudget = 10'000'000;

class EnumerationTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPureInteger : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using IntVector = std::vector<std::int64_t>;

struct IntPoint {
  IntVector x;
  IntVector y;

  Point to_point() const;
  friend auto operator<=>(const IntPoint&, const IntPoint&) = default;
};

/// Pure-integer instance with every row scaled to integer coefficients, so all
/// membership tests are exact. Does not depend on any LP machinery.
class ExactModel {
 public:
  /// Throws NotPureInteger for mixed instances and std::invalid_argument when
  /// bounds are infinite or scaled data overflow 64 bits.
  explicit ExactModel(const MiblpInstance& inst, long long budget = kEnumerationBudget);

  int n1() const { return n1_; }
  int n2() const { return n2_; }

  bool leader_rows_hold(const IntVector& x, const IntVector& y) const;
  bool follower_rows_hold(const IntVector& x, const IntVector& y) const;
  bool in_S(const IntVector& x, const IntVector& y) const;

  /// d2·y scaled by a positive constant; only comparisons are meaningful.
  std::int64_t follower_key(const IntVector& y) const;
  /// c·x + d1·y, exact.
  Rational leader_value(const IntVector& x, const IntVector& y) const;

  /// Integer points of the leader box in lexicographic order.
  void for_each_x(const std::function<void(const IntVector&)>& fn) const;
  /// L(x) = {y integer in its box : G2 y >= b2 - A2 x}, lexicographic order.
  std::vector<IntVector> follower_set(const IntVector& x) const;

  const IntVector& x_lo() const { return xlo_; }
  const IntVector& x_hi() const { return xhi_; }
  const IntVector& y_lo() const { return ylo_; }
  const IntVector& y_hi() const { return yhi_; }

 private:
  struct Row {
    IntVector a;  // over (x, y)
    std::int64_t b = 0;
  };
  static bool holds(const Row& row, const IntVector& x, const IntVector& y);

  int n1_ = 0;
  int n2_ = 0;
  std::vector<Row> leader_rows_;
  std::vector<Row> follower_rows_;
  IntVector d2_;
  RationalVector c_;
  RationalVector d1_;
  IntVector xlo_, xhi_, ylo_, yhi_;
};

std::vector<IntPoint> enumerate_S(const MiblpInstance& inst, long long budget = kEnumerationBudget);

/// {(x, y) in S : d2 y = min over L(x)}; ties are all kept.
std::vector<IntPoint> enumerate_F(const MiblpInstance& inst, long long budget = kEnumerationBudget);

/// min d2·y over L(x) as an exact rational; nullopt when L(x) is empty.
std::optional<Rational> phi_by_enumeration(const MiblpInstance& inst, const IntVector& x);

struct EnumeratedOptimum {
  bool feasible = false;
  IntPoint point;
  Rational value;
};

/// Best leader objective over enumerate_F; ties broken lexicographically.
EnumeratedOptimum optimal_by_enumeration(const MiblpInstance& inst, long long budget = kEnumerationBudget);

}  // namespace miblp
