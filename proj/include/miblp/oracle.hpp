#pragma once

#include "miblp/milp.hpp"
#include "miblp/numeric.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace miblp {

enum class DirectionMethod { ExactMilp, ExactMilpK, LocalSearch };
enum class ObjectiveKind { Norm1, IdicFriendly, Steepest };

const char* to_string(DirectionMethod method);
const char* to_string(ObjectiveKind kind);

/// Follower-space direction. Integer components are exact integers.
struct Direction {
  std::vector<double> w;
  double norm1 = 0.0;
  /// d2·w; at most -1 for every emitted improving direction.
  double improvement = 0.0;
};

Direction make_direction(const NumericInstance& inst, std::vector<double> w);

struct OracleConfig {
  DirectionMethod method = DirectionMethod::ExactMilp;
  int k = 2;
  int depth_lb = 0;
  int depth_ub = std::numeric_limits<int>::max();
  ObjectiveKind objective = ObjectiveKind::Norm1;
  MilpLimits limits{};

  /// Throws std::invalid_argument when k < 1 for a k-method or lb > ub.
  void check() const;
};

struct OracleOutcome {
  enum class Kind { NoImprovingDirection, Found, HeuristicExhausted, Inconclusive };
  Kind kind = Kind::Inconclusive;
  Direction direction;
  /// Method that produced the outcome.
  DirectionMethod method = DirectionMethod::ExactMilp;

  bool found() const { return kind == Kind::Found; }
};

const char* to_string(OracleOutcome::Kind kind);

struct OracleStats {
  long exact_calls = 0;
  long k_milp_calls = 0;
  long local_search_calls = 0;
  long phi_calls = 0;
  long ifd_calls = 0;
  double ifd_seconds = 0.0;
};

class PointNotInS : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Subsolver limits were exhausted; the answer is unknown.
class OracleInconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (ID): variables w [, w+, w-] [, s], rows d2·w <= -1 and
/// G2 w >= b2 - A2 x - G2 y, bounds l - y <= w <= u - y, integer w on the
/// first r2 entries.
MilpProblem build_id_milp(const NumericInstance& inst, const Point& point, ObjectiveKind objective);

/// (ID) plus sum(w+ + w-) <= k.
MilpProblem build_k_id_milp(const NumericInstance& inst, const Point& point, int k, ObjectiveKind objective);

/// Solves (ID) or (k-ID) and converts the result. Exact (ID) infeasibility
/// yields NoImprovingDirection; (k-ID) infeasibility yields HeuristicExhausted.
OracleOutcome solve_direction_milp(const NumericInstance& inst, const Point& point, std::optional<int> k,
                                   ObjectiveKind objective, const MilpLimits& limits = {},
                                   MilpMode mode = MilpMode::Optimize);

using DirectionScore = std::function<double(const std::vector<double>& w)>;

DirectionScore objective_score(const NumericInstance& inst, const Point& point, ObjectiveKind objective);

/// Neighborhood enumeration: all integer w on the first r2 coordinates with
/// 1 <= |w|_1 <= k (continuous entries 0), shell by shell and
/// lexicographically within a shell; returns the best-scoring improving
/// feasible direction (first one on ties) or HeuristicExhausted.
OracleOutcome local_search_neighbors(const NumericInstance& inst, int k, const Point& point,
                                     ObjectiveKind objective);
OracleOutcome local_search_neighbors(const NumericInstance& inst, int k, const Point& point,
                                     const DirectionScore& score, bool stop_at_first = false);

/// Heuristic inside the depth window, exact (ID) otherwise; a heuristic miss on
/// a point of S is escalated to (ID) so the answer is a certificate.
OracleOutcome find_improving_direction(const NumericInstance& inst, const Point& point, int depth,
                                       const OracleConfig& cfg, OracleStats* stats = nullptr);

/// True iff (ID) is infeasible. Throws PointNotInS for points outside S.
bool certify_bilevel_feasible(const NumericInstance& inst, const Point& point, const MilpLimits& limits = {});

/// Feasibility of (k-ID) at a point.
bool k_id_feasible(const NumericInstance& inst, const Point& point, int k, const MilpLimits& limits = {});

struct FollowerSolution {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> y;
};

/// Optimal follower response at x. Throws OracleInconclusive on limits.
FollowerSolution solve_follower(const NumericInstance& inst, const std::vector<double>& x,
                                const MilpLimits& limits = {}, OracleStats* stats = nullptr);

/// min d2·y over {y in Y : G2 y >= b2 - A2 x, bounds}; +inf when empty.
double evaluate_phi(const NumericInstance& inst, const std::vector<double>& x, const MilpLimits& limits = {},
                    OracleStats* stats = nullptr);

/// d2·y <= phi(x). Throws PointNotInS for points outside S.
bool legacy_feasibility_check(const NumericInstance& inst, const Point& point, const MilpLimits& limits = {},
                              OracleStats* stats = nullptr);

}  // namespace miblp
