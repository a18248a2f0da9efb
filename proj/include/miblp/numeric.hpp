#pragma once

#include "miblp/instance.hpp"
#include "miblp/simplex.hpp"

#include <Eigen/Dense>

namespace miblp {

/// Floating-point copy of a finalized instance. Built once per solve so the
/// hot paths never touch rational arithmetic.
struct NumericInstance {
  int n1 = 0;
  int r1 = 0;
  int n2 = 0;
  int r2 = 0;

  Eigen::VectorXd c, d1, d2;
  Eigen::MatrixXd A1, G1, A2, G2;
  Eigen::VectorXd b1, b2;
  /// Stacked (x, y) bounds; all finite.
  Eigen::VectorXd lower, upper;

  /// Integrality of A2 x + G2 y - b2 over S is guaranteed, so free sets use the
  /// "-1" relaxation; otherwise a small epsilon is used.
  bool unit_relaxation = true;

  NumericInstance() = default;
  /// Throws std::invalid_argument when an upper bound is still infinite.
  NumericInstance(const MiblpInstance& inst);  // NOLINT(google-explicit-constructor)

  int m1() const { return static_cast<int>(b1.size()); }
  int m2() const { return static_cast<int>(b2.size()); }
  int num_vars() const { return n1 + n2; }
  double y_lower(int j) const { return lower[n1 + j]; }
  double y_upper(int j) const { return upper[n1 + j]; }
  bool is_linking(int j) const { return A2.rows() > 0 && A2.col(j).cwiseAbs().maxCoeff() > 0.0; }

  /// Relaxation amount used in the free sets.
  double relaxation() const { return unit_relaxation ? 1.0 : 1e-4; }
};

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kIntTol = 1e-6;

bool is_integral(double v, double tol = kIntTol);

/// Row and bound feasibility of the stacked point for both constraint blocks.
bool in_P(const NumericInstance& inst, const Point& p, double tol = 1e-7);
/// in_P plus integrality on the first r1 leader and r2 follower entries.
bool in_S(const NumericInstance& inst, const Point& p, double tol = 1e-7);

/// min c·x + d1·y over P: leader rows then follower rows, instance bounds.
LpProblem relaxation_lp(const NumericInstance& inst);

Eigen::VectorXd to_eigen(const std::vector<double>& v);
std::vector<double> to_std(const Eigen::VectorXd& v);

}  // namespace miblp
