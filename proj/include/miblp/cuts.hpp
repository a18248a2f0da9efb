#pragma once

#include "miblp/numeric.hpp"
#include "miblp/simplex.hpp"

#include <optional>
#include <string>
#include <vector>

namespace miblp {

enum class CutFamily { Idic, Isic };

const char* to_string(CutFamily family);

/// rows·(x, y) >= rhs over the full space; no bilevel feasible point lies in
/// its interior.
struct BilevelFreeSet {
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;
  CutFamily family = CutFamily::Idic;
  /// The direction w (Idic) or the improving solution y* (Isic).
  std::vector<double> generator;

  /// Minimum row slack at the stacked point.
  double min_slack(const Eigen::VectorXd& z) const;
  bool strictly_contains(const Eigen::VectorXd& z, double margin) const { return min_slack(z) > margin; }
};

/// A2 x + G2 y >= b2 - delta - G2 w and delta-relaxed bounds on y + w, where
/// delta is 1 on integer follower entries (0 on continuous bound rows).
BilevelFreeSet bfs_from_direction(const NumericInstance& inst, const std::vector<double>& w);

/// d2 y >= d2 y* and A2 x >= b2 - G2 y* - delta.
BilevelFreeSet bfs_from_solution(const NumericInstance& inst, const std::vector<double>& y_star);

/// alpha_x·x + alpha_y·y >= beta.
struct Cut {
  std::vector<double> alpha_x;
  std::vector<double> alpha_y;
  double beta = 0.0;
  CutFamily family = CutFamily::Idic;
  std::vector<double> vertex;
  /// Generator of the free set (w or y*).
  std::vector<double> generator;
  /// Valid only inside the subtree whose bounds shaped the cone.
  bool local = false;
  int norm_of_direction = 0;
};

/// beta - alpha·p; positive means violated.
double cut_violation(const Cut& cut, const Point& p);
double cut_violation(const Cut& cut, const Eigen::VectorXd& stacked);

struct CutResult {
  enum class Status { Generated, NotSeparable, ConeInsideFreeSet };
  Status status = Status::NotSeparable;
  Cut cut;
};

inline constexpr double kInteriorMargin = 1e-7;

/// Intersection cut from the cone and the free set, scaled so that the
/// largest |alpha| is 1.
CutResult intersection_cut(const SimplicialCone& cone, const BilevelFreeSet& set, int n1);

}  // namespace miblp
