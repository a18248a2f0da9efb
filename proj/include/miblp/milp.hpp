#pragma once

#include "miblp/simplex.hpp"

#include <limits>
#include <optional>
#include <vector>

namespace miblp {

enum class MilpMode { Optimize, FirstFeasible };

struct MilpProblem {
  LpProblem lp;
  /// Sorted, unique, within [0, num_vars).
  std::vector<int> integers;
  /// Only solutions with objective strictly below the cutoff are accepted.
  std::optional<double> cutoff;
  MilpMode mode = MilpMode::Optimize;

  /// Throws std::invalid_argument when an integer index is out of range.
  void check() const;
};

enum class MilpStatus { Optimal, Infeasible, FeasibleFound, LimitReached };

const char* to_string(MilpStatus status);

struct MilpLimits {
  long max_nodes = 1'000'000;
  double time_limit = std::numeric_limits<double>::infinity();
};

struct MilpSolution {
  MilpStatus status = MilpStatus::Infeasible;
  /// Integral within 1e-6 on integer indices (snapped exactly); empty when no
  /// incumbent exists.
  Eigen::VectorXd x;
  double objective = std::numeric_limits<double>::infinity();
  long nodes = 0;

  bool has_incumbent() const { return x.size() > 0; }
};

/// LP-based branch and bound: depth-first dive until the first incumbent, then
/// best-first on the parent bound; branching on the most fractional variable.
MilpSolution solve_milp(const MilpProblem& problem, const MilpLimits& limits = {});

}  // namespace miblp
