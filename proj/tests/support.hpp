#pragma once

// Hand-rolled generators and independent reference solvers for the tests.

#include "miblp/instance.hpp"
#include "miblp/milp.hpp"
#include "miblp/simplex.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace miblp::testing {

#ifndef MIBLP_DATA_DIR
#define MIBLP_DATA_DIR "data"
#endif

inline std::string data_path(const std::string& name) { return std::string(MIBLP_DATA_DIR) + "/" + name; }

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Integer data, box [lo, hi] per variable, n <= 3 so vertex enumeration stays cheap.
inline LpProblem random_lp(Gen& g, int n, int m) {
  LpProblem lp(n);
  for (int j = 0; j < n; ++j) {
    lp.objective[j] = g.integer(-5, 5);
    lp.lower[j] = g.integer(-3, 1);
    lp.upper[j] = lp.lower[j] + g.integer(0, 5);
  }
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd row(n);
    for (int j = 0; j < n; ++j) row[j] = g.integer(-4, 4);
    lp.add_row(row, g.integer(-6, 4));
  }
  return lp;
}

struct ReferenceResult {
  bool feasible = false;
  double value = 0.0;
};

/// Minimum over all basic solutions: every n-subset of rows and bound
/// constraints solved as equalities.
inline ReferenceResult lp_by_vertex_enumeration(const LpProblem& lp) {
  const int n = lp.num_vars();
  std::vector<Eigen::VectorXd> a;
  std::vector<double> b;
  for (int i = 0; i < lp.num_rows(); ++i) {
    a.push_back(lp.rows.row(i).transpose());
    b.push_back(lp.rhs[i]);
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
    a.push_back(e);
    b.push_back(lp.lower[j]);
    a.push_back(-e);
    b.push_back(-lp.upper[j]);
  }
  const int total = static_cast<int>(a.size());
  ReferenceResult best;
  std::vector<int> pick(n);
  for (int i = 0; i < n; ++i) pick[i] = i;
  if (n == 0) return {true, 0.0};
  while (true) {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) {
      M.row(i) = a[pick[i]].transpose();
      r[i] = b[pick[i]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.rank() == n) {
      Eigen::VectorXd z = lu.solve(r);
      bool ok = true;
      for (int i = 0; i < total && ok; ++i) ok = a[i].dot(z) >= b[i] - 1e-9;
      if (ok) {
        const double v = lp.objective.dot(z);
        if (!best.feasible || v < best.value) best = {true, v};
      }
    }
    int k = n - 1;
    while (k >= 0 && pick[k] == total - n + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int i = k + 1; i < n; ++i) pick[i] = pick[i - 1] + 1;
  }
  return best;
}

/// Grid over integer variables; the continuous remainder by vertex enumeration.
inline ReferenceResult milp_by_grid(const MilpProblem& p) {
  const int n = p.lp.num_vars();
  std::vector<long> lo, hi;
  for (int j : p.integers) {
    lo.push_back(static_cast<long>(std::ceil(p.lp.lower[j] - 1e-9)));
    hi.push_back(static_cast<long>(std::floor(p.lp.upper[j] + 1e-9)));
    if (lo.back() > hi.back()) return {};
  }
  ReferenceResult best;
  std::vector<long> cur = lo;
  while (true) {
    LpProblem fixed = p.lp;
    for (std::size_t t = 0; t < p.integers.size(); ++t) {
      fixed.lower[p.integers[t]] = fixed.upper[p.integers[t]] = static_cast<double>(cur[t]);
    }
    ReferenceResult r;
    if (static_cast<int>(p.integers.size()) == n) {
      Eigen::VectorXd z = fixed.lower;
      bool ok = true;
      for (int i = 0; i < fixed.num_rows() && ok; ++i) ok = fixed.rows.row(i).dot(z) >= fixed.rhs[i] - 1e-9;
      if (ok) r = {true, fixed.objective.dot(z)};
    } else {
      r = lp_by_vertex_enumeration(fixed);
    }
    if (r.feasible && (!best.feasible || r.value < best.value)) best = r;
    std::size_t t = 0;
    while (t < cur.size() && cur[t] == hi[t]) {
      cur[t] = lo[t];
      ++t;
    }
    if (t == cur.size()) break;
    ++cur[t];
  }
  return best;
}

inline MilpProblem random_milp(Gen& g, int n, int m) {
  MilpProblem p;
  p.lp = random_lp(g, n, m);
  for (int j = 0; j < n; ++j) {
    if (g.coin(0.7)) p.integers.push_back(j);
  }
  return p;
}

/// Random small pure-integer bilevel instance through the public generator.
inline MiblpInstance random_instance(Gen& g) {
  GeneratorParams params;
  params.n1 = g.integer(1, 2);
  params.n2 = g.integer(1, 3);
  params.m1 = g.integer(0, 1);
  params.m2 = g.integer(1, 3);
  params.coeff_lo = -4;
  params.coeff_hi = 4;
  params.bound = g.integer(2, 4);
  while (true) {
    try {
      return finalize_bounds(generate_random_instance(g.engine()(), params));
    } catch (const GenerationFailure&) {
    }
  }
}

}  // namespace miblp::testing
