#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace miblp {

/// min objective·z  s.t.  rows·z >= rhs,  lower <= z <= upper.
/// All bounds must be finite.
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  LpProblem() = default;
  explicit LpProblem(int num_vars);

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.rows()); }

  void add_row(const Eigen::VectorXd& coefficients, double row_rhs);
  /// Throws std::invalid_argument on inconsistent dimensions or infinite bounds.
  void check() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericallyUnstable, IterationLimit };

const char* to_string(LpStatus status);

enum class BasisStatus : std::uint8_t { Basic, AtLower, AtUpper };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// One entry per structural variable followed by one per row slack
  /// (row i reads rows_i·z - s_i = rhs_i with s_i >= 0).
  std::vector<BasisStatus> basis;
  int iterations = 0;
};

struct SimplexOptions {
  int max_iterations = 200000;
  int refactor_interval = 50;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  /// Use Bland's rule from the first pivot.
  bool force_bland = false;
};

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

/// Vertex plus one ray per nonbasic structural/slack. Every point satisfying
/// the constraints that are tight in the basis lies in vertex + cone(rays).
struct SimplicialCone {
  Eigen::VectorXd vertex;
  /// Column j is ray j.
  Eigen::MatrixXd rays;
  /// Column index (structural j, or num_vars + row) whose move generated ray j.
  std::vector<int> ray_source;
};

class DegenerateCone : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requires an Optimal solution of `problem`. Throws DegenerateCone when the
/// basis descriptor is inconsistent or the rays are numerically dependent.
SimplicialCone extract_cone(const LpProblem& problem, const LpSolution& solution);

}  // namespace miblp
