#pragma once

#include "miblp/cuts.hpp"
#include "miblp/oracle.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace miblp {

enum class OracleMode { ImprovingDirection, Legacy };
enum class BranchStrategy { Fractional, LinkingPriority };

const char* to_string(OracleMode mode);
const char* to_string(BranchStrategy strategy);

struct SolverConfig {
  OracleMode oracle_mode = OracleMode::ImprovingDirection;
  OracleConfig oracle{};
  bool use_idic = true;
  bool use_isic = false;
  BranchStrategy branching = BranchStrategy::Fractional;
  int max_cut_rounds = 20;
  double tailing_off_threshold = 1e-6;
  int tailing_off_rounds = 3;
  double time_limit = std::numeric_limits<double>::infinity();
  long node_limit = 10'000'000;
  std::uint64_t seed = 0;
  /// One line per processed node when set.
  std::ostream* trace = nullptr;
  /// Keep every generated cut together with the node box it was derived in.
  bool record_cuts = false;

  /// Throws std::invalid_argument on inconsistent settings.
  void check() const;
};

enum class SolveStatus { Optimal, Infeasible, LimitReached };

const char* to_string(SolveStatus status);

struct SolveStats {
  /// Nodes whose LP was solved; nodes dropped on their parent bound are not counted.
  long nodes = 0;
  long lp_solves = 0;
  long idic_cuts = 0;
  long isic_cuts = 0;
  long inconclusive = 0;
  double seconds = 0.0;
  OracleStats oracle{};

  double average_ifd_seconds() const {
    return oracle.ifd_calls > 0 ? oracle.ifd_seconds / static_cast<double>(oracle.ifd_calls) : 0.0;
  }
};

struct RecordedCut {
  Cut cut;
  /// Box of the node that produced the cut; only meaningful for local cuts.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct SolveResult {
  SolveStatus status = SolveStatus::LimitReached;
  bool has_incumbent = false;
  Point incumbent;
  double value = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  SolveStats stats;
  std::vector<RecordedCut> cuts;
  std::vector<Point> incumbent_history;
};

/// (U - L) / max(1, |U|); +inf without an incumbent, 0 when L >= U.
double relative_gap(double upper, double lower);

struct BranchDecision {
  int var = -1;
  /// Children: z_var <= down_upper and z_var >= up_lower.
  double down_upper = 0.0;
  double up_lower = 0.0;
};

/// Fractional: integer variable with fraction closest to 0.5 (lowest index on
/// ties). LinkingPriority: most fractional linking variable with nonzero
/// domain width, integral values allowed; falls back to Fractional.
std::optional<BranchDecision> choose_branch_variable(const NumericInstance& inst, const Eigen::VectorXd& z,
                                                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                                     BranchStrategy strategy);

struct Node {
  long id = 0;
  int depth = 0;
  double parent_bound = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  /// Indices of local cuts inherited along the path from the root.
  std::vector<int> local_cuts;
  /// Global pool cuts loaded into the node LP up front; the rest of the pool
  /// is separated lazily.
  std::vector<int> active_cuts;
};

struct NodeBound {
  enum class Outcome { Pruned, Feasible, Branch };
  Outcome outcome = Outcome::Pruned;
  double bound = std::numeric_limits<double>::infinity();
  /// LP optimum (integer entries snapped) for Feasible/Branch.
  Eigen::VectorXd point;
  int cuts_added = 0;
  std::string reason;
};

/// Branch and cut driven by the improving-direction oracle (or the legacy
/// value-function check).
class BranchAndCut {
 public:
  BranchAndCut(const MiblpInstance& inst, SolverConfig cfg);

  SolveResult solve();

  /// LP bound plus cut loop for one node. Global cuts go to the pool; local
  /// cuts are appended to node.local_cuts.
  NodeBound bound_node(Node& node);

  Node root() const;
  const NumericInstance& numeric() const { return num_; }

 private:
  struct PoolCut {
    Cut cut;
    bool local = false;
  };

  LpProblem node_lp(const Node& node, std::vector<int>& row_cut) const;
  /// Adds violated global pool cuts to node.active_cuts; returns how many.
  int separate_pool(Node& node, const Eigen::VectorXd& z) const;
  void keep_tight_cuts(Node& node, const Eigen::VectorXd& z) const;
  std::optional<LpSolution> solve_node_lp(const LpProblem& lp);
  Eigen::VectorXd snap(const Eigen::VectorXd& z) const;
  bool integral(const Eigen::VectorXd& z) const;
  Point split(const Eigen::VectorXd& z) const;
  double objective(const Eigen::VectorXd& z) const;
  double prune_threshold() const;
  double round_bound(double lp_value) const;
  bool time_up() const;
  int add_cuts_from(const BilevelFreeSet& set, const SimplicialCone& cone, const std::vector<bool>& local_source,
                    const Eigen::VectorXd& vertex, Node& node, bool& cone_inside);
  bool cone_is_local(const SimplicialCone& cone, const LpSolution& sol, const Node& node,
                     const std::vector<int>& row_cut) const;
  void trace(const Node& node, double bound, const std::string& action) const;

  MiblpInstance inst_;
  NumericInstance num_;
  SolverConfig cfg_;
  LpProblem base_;
  Eigen::VectorXd root_lower_;
  Eigen::VectorXd root_upper_;
  std::vector<PoolCut> cuts_;
  bool integer_objective_ = false;
  SolveResult result_;
  double start_ = 0.0;
};

/// Throws std::invalid_argument when the instance fails boundedness or the
/// linking-integrality requirement.
SolveResult solve(const MiblpInstance& inst, const SolverConfig& cfg);

}  // namespace miblp
