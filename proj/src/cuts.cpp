#include "miblp/cuts.hpp"

#include <cmath>
#include <limits>

namespace miblp {

namespace {

constexpr double kDenominatorGuard = 1e-9;

}  // namespace

const char* to_string(CutFamily family) { return family == CutFamily::Idic ? "IDIC" : "ISIC"; }

double BilevelFreeSet::min_slack(const Eigen::VectorXd& z) const {
  if (rows.rows() == 0) return std::numeric_limits<double>::infinity();
  return (rows * z - rhs).minCoeff();
}

BilevelFreeSet bfs_from_direction(const NumericInstance& inst, const std::vector<double>& w) {
  const int n1 = inst.n1;
  const int n2 = inst.n2;
  const int m2 = inst.m2();
  const double delta = inst.relaxation();
  const Eigen::VectorXd we = to_eigen(w);

  BilevelFreeSet set;
  set.family = CutFamily::Idic;
  set.generator = w;
  set.rows = Eigen::MatrixXd::Zero(m2 + 2 * n2, n1 + n2);
  set.rhs.resize(m2 + 2 * n2);
  set.rows.topLeftCorner(m2, n1) = inst.A2;
  set.rows.topRightCorner(m2, n2) = inst.G2;
  if (m2 > 0) set.rhs.head(m2) = inst.b2 - Eigen::VectorXd::Constant(m2, delta) - inst.G2 * we;
  for (int j = 0; j < n2; ++j) {
    const double relax = j < inst.r2 ? delta : 0.0;
    set.rows(m2 + j, n1 + j) = 1.0;
    set.rhs[m2 + j] = inst.y_lower(j) - relax - we[j];
    set.rows(m2 + n2 + j, n1 + j) = -1.0;
    set.rhs[m2 + n2 + j] = -inst.y_upper(j) - relax + we[j];
  }
  return set;
}

BilevelFreeSet bfs_from_solution(const NumericInstance& inst, const std::vector<double>& y_star) {
  const int n1 = inst.n1;
  const int n2 = inst.n2;
  const int m2 = inst.m2();
  const Eigen::VectorXd ys = to_eigen(y_star);

  BilevelFreeSet set;
  set.family = CutFamily::Isic;
  set.generator = y_star;
  set.rows = Eigen::MatrixXd::Zero(1 + m2, n1 + n2);
  set.rhs.resize(1 + m2);
  set.rows.block(0, n1, 1, n2) = inst.d2.transpose();
  set.rhs[0] = inst.d2.dot(ys);
  if (m2 > 0) {
    set.rows.bottomLeftCorner(m2, n1) = inst.A2;
    set.rhs.tail(m2) = inst.b2 - inst.G2 * ys - Eigen::VectorXd::Constant(m2, inst.relaxation());
  }
  return set;
}

double cut_violation(const Cut& cut, const Point& p) {
  double lhs = 0.0;
  for (std::size_t j = 0; j < cut.alpha_x.size(); ++j) lhs += cut.alpha_x[j] * p.x[j];
  for (std::size_t j = 0; j < cut.alpha_y.size(); ++j) lhs += cut.alpha_y[j] * p.y[j];
  return cut.beta - lhs;
}

double cut_violation(const Cut& cut, const Eigen::VectorXd& stacked) {
  const std::size_t n1 = cut.alpha_x.size();
  double lhs = 0.0;
  for (std::size_t j = 0; j < n1; ++j) lhs += cut.alpha_x[j] * stacked[static_cast<Eigen::Index>(j)];
  for (std::size_t j = 0; j < cut.alpha_y.size(); ++j) {
    lhs += cut.alpha_y[j] * stacked[static_cast<Eigen::Index>(n1 + j)];
  }
  return cut.beta - lhs;
}

CutResult intersection_cut(const SimplicialCone& cone, const BilevelFreeSet& set, int n1) {
  CutResult result;
  const Eigen::Index n = cone.vertex.size();
  const Eigen::VectorXd slack = set.rows * cone.vertex - set.rhs;
  if (set.rows.rows() > 0 && slack.minCoeff() <= kInteriorMargin) {
    result.status = CutResult::Status::NotSeparable;
    return result;
  }

  // gamma_j = 1 / lambda_j, with lambda_j the step at which ray j leaves the set
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n);
  bool any_finite = false;
  const Eigen::MatrixXd ar = set.rows * cone.rays;
  for (Eigen::Index j = 0; j < n; ++j) {
    double lambda = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < ar.rows(); ++i) {
      if (ar(i, j) < -kDenominatorGuard) lambda = std::min(lambda, slack[i] / -ar(i, j));
    }
    if (std::isfinite(lambda)) {
      gamma[j] = 1.0 / lambda;
      any_finite = true;
    }
  }
  if (!any_finite) {
    result.status = CutResult::Status::ConeInsideFreeSet;
    return result;
  }

  // z = R^{-1}(p - v): gamma·z >= 1  <=>  alpha·p >= 1 + alpha·v with alpha = R^{-T} gamma
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cone.rays.transpose());
  Eigen::VectorXd alpha = lu.solve(gamma);
  double beta = 1.0 + alpha.dot(cone.vertex);
  const double scale = alpha.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    result.status = CutResult::Status::NotSeparable;
    return result;
  }
  alpha /= scale;
  beta /= scale;

  Cut& cut = result.cut;
  cut.family = set.family;
  cut.alpha_x.assign(alpha.data(), alpha.data() + n1);
  cut.alpha_y.assign(alpha.data() + n1, alpha.data() + n);
  cut.beta = beta;
  cut.vertex = to_std(cone.vertex);
  cut.generator = set.generator;
  if (cut_violation(cut, cone.vertex) < kInteriorMargin * 1e-2) {
    result.status = CutResult::Status::NotSeparable;
    return result;
  }
  result.status = CutResult::Status::Generated;
  return result;
}

}  // namespace miblp
