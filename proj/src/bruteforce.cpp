#include "miblp/bruteforce.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace miblp {

namespace {

constexpr std::int64_t kSafeMagnitude = std::int64_t{1} << 60;

std::int64_t to_int64(const BigInt& v) {
  if (v > kSafeMagnitude || v < -kSafeMagnitude) {
    throw std::invalid_argument("exact model: scaled coefficient exceeds 64-bit range");
  }
  return v.convert_to<std::int64_t>();
}

// Multiplies every entry by the lcm of the denominators.
IntVector scale_to_integers(const RationalVector& values) {
  BigInt lcm_den = 1;
  for (const auto& v : values) {
    BigInt den = denominator(v);
    lcm_den = lcm_den / boost::multiprecision::gcd(lcm_den, den) * den;
  }
  IntVector out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(to_int64(numerator(v) * (lcm_den / denominator(v))));
  return out;
}

template <typename Fn>
void for_each_in_box(const IntVector& lo, const IntVector& hi, Fn&& fn) {
  const std::size_t n = lo.size();
  for (std::size_t j = 0; j < n; ++j) {
    if (lo[j] > hi[j]) return;
  }
  IntVector z(lo);
  while (true) {
    fn(static_cast<const IntVector&>(z));
    std::size_t j = n;
    while (j > 0) {
      --j;
      if (z[j] < hi[j]) {
        ++z[j];
        break;
      }
      z[j] = lo[j];
      if (j == 0) return;
    }
    if (n == 0) return;
  }
}

long double box_size(const IntVector& lo, const IntVector& hi) {
  long double size = 1.0L;
  for (std::size_t j = 0; j < lo.size(); ++j) size *= std::max<long double>(0.0L, hi[j] - lo[j] + 1.0L);
  return size;
}

}  // namespace

Point IntPoint::to_point() const {
  Point p;
  p.x.assign(x.begin(), x.end());
  p.y.assign(y.begin(), y.end());
  return p;
}

ExactModel::ExactModel(const MiblpInstance& inst, long long budget) : n1_(inst.n1), n2_(inst.n2) {
  inst.check_dimensions();
  if (!inst.pure_integer()) throw NotPureInteger("enumeration requires a pure-integer instance");
  if (!inst.has_finite_bounds()) throw std::invalid_argument("enumeration requires finite bounds");

  auto make_rows = [&](const RationalMatrix& a, const RationalMatrix& g, const RationalVector& b,
                       std::vector<Row>& out) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      RationalVector all(a[i]);
      all.insert(all.end(), g[i].begin(), g[i].end());
      all.push_back(b[i]);
      IntVector scaled = scale_to_integers(all);
      Row row;
      row.b = scaled.back();
      scaled.pop_back();
      row.a = std::move(scaled);
      out.push_back(std::move(row));
    }
  };
  make_rows(inst.A1, inst.G1, inst.b1, leader_rows_);
  make_rows(inst.A2, inst.G2, inst.b2, follower_rows_);
  d2_ = scale_to_integers(inst.d2);
  c_ = inst.c;
  d1_ = inst.d1;

  for (int j = 0; j < inst.num_vars(); ++j) {
    std::int64_t lo = to_int64(numerator(ceil(inst.lower[j])));
    std::int64_t hi = to_int64(numerator(floor(*inst.upper[j])));
    if (j < n1_) {
      xlo_.push_back(lo);
      xhi_.push_back(hi);
    } else {
      ylo_.push_back(lo);
      yhi_.push_back(hi);
    }
  }
  if (box_size(xlo_, xhi_) * box_size(ylo_, yhi_) > static_cast<long double>(budget)) {
    throw EnumerationTooLarge("enumeration too large: grid exceeds " + std::to_string(budget) + " points");
  }
}

bool ExactModel::holds(const Row& row, const IntVector& x, const IntVector& y) {
  __int128 lhs = 0;
  const std::size_t n1 = x.size();
  for (std::size_t j = 0; j < n1; ++j) lhs += static_cast<__int128>(row.a[j]) * x[j];
  for (std::size_t j = 0; j < y.size(); ++j) lhs += static_cast<__int128>(row.a[n1 + j]) * y[j];
  return lhs >= row.b;
}

bool ExactModel::leader_rows_hold(const IntVector& x, const IntVector& y) const {
  return std::all_of(leader_rows_.begin(), leader_rows_.end(), [&](const Row& r) { return holds(r, x, y); });
}

bool ExactModel::follower_rows_hold(const IntVector& x, const IntVector& y) const {
  return std::all_of(follower_rows_.begin(), follower_rows_.end(), [&](const Row& r) { return holds(r, x, y); });
}

bool ExactModel::in_S(const IntVector& x, const IntVector& y) const {
  for (int j = 0; j < n1_; ++j) {
    if (x[j] < xlo_[j] || x[j] > xhi_[j]) return false;
  }
  for (int j = 0; j < n2_; ++j) {
    if (y[j] < ylo_[j] || y[j] > yhi_[j]) return false;
  }
  return leader_rows_hold(x, y) && follower_rows_hold(x, y);
}

std::int64_t ExactModel::follower_key(const IntVector& y) const {
  __int128 v = 0;
  for (int j = 0; j < n2_; ++j) v += static_cast<__int128>(d2_[j]) * y[j];
  return static_cast<std::int64_t>(v);
}

Rational ExactModel::leader_value(const IntVector& x, const IntVector& y) const {
  Rational v = 0;
  for (int j = 0; j < n1_; ++j) v += c_[j] * x[j];
  for (int j = 0; j < n2_; ++j) v += d1_[j] * y[j];
  return v;
}

void ExactModel::for_each_x(const std::function<void(const IntVector&)>& fn) const {
  for_each_in_box(xlo_, xhi_, fn);
}

std::vector<IntVector> ExactModel::follower_set(const IntVector& x) const {
  std::vector<IntVector> out;
  for_each_in_box(ylo_, yhi_, [&](const IntVector& y) {
    if (follower_rows_hold(x, y)) out.push_back(y);
  });
  return out;
}

std::vector<IntPoint> enumerate_S(const MiblpInstance& inst, long long budget) {
  ExactModel model(inst, budget);
  std::vector<IntPoint> out;
  model.for_each_x([&](const IntVector& x) {
    for (const IntVector& y : model.follower_set(x)) {
      if (model.leader_rows_hold(x, y)) out.push_back({x, y});
    }
  });
  return out;
}

std::vector<IntPoint> enumerate_F(const MiblpInstance& inst, long long budget) {
  ExactModel model(inst, budget);
  std::vector<IntPoint> out;
  model.for_each_x([&](const IntVector& x) {
    std::vector<IntVector> reaction = model.follower_set(x);
    if (reaction.empty()) return;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const IntVector& y : reaction) best = std::min(best, model.follower_key(y));
    for (const IntVector& y : reaction) {
      if (model.follower_key(y) == best && model.leader_rows_hold(x, y)) out.push_back({x, y});
    }
  });
  return out;
}

std::optional<Rational> phi_by_enumeration(const MiblpInstance& inst, const IntVector& x) {
  ExactModel model(inst);
  std::optional<Rational> best;
  for (const IntVector& y : model.follower_set(x)) {
    Rational v = 0;
    for (int j = 0; j < inst.n2; ++j) v += inst.d2[j] * y[j];
    if (!best || v < *best) best = v;
  }
  return best;
}

EnumeratedOptimum optimal_by_enumeration(const MiblpInstance& inst, long long budget) {
  ExactModel model(inst, budget);
  EnumeratedOptimum best;
  for (const IntPoint& p : enumerate_F(inst, budget)) {
    Rational v = model.leader_value(p.x, p.y);
    if (!best.feasible || v < best.value) {
      best.feasible = true;
      best.point = p;
      best.value = v;
    }
  }
  return best;
}

}  // namespace miblp
