#include "miblp/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace miblp {

namespace {

Eigen::MatrixXd dense(const RationalMatrix& m, int cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), cols);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (int j = 0; j < cols; ++j) out(static_cast<Eigen::Index>(i), j) = to_double(m[i][j]);
  }
  return out;
}

Eigen::VectorXd dense(const RationalVector& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = to_double(v[i]);
  return out;
}

}  // namespace

NumericInstance::NumericInstance(const MiblpInstance& inst)
    : n1(inst.n1), r1(inst.r1), n2(inst.n2), r2(inst.r2) {
  inst.check_dimensions();
  if (!inst.has_finite_bounds()) {
    throw std::invalid_argument("instance has infinite upper bounds; finalize bounds first");
  }
  c = dense(inst.c);
  d1 = dense(inst.d1);
  d2 = dense(inst.d2);
  A1 = dense(inst.A1, n1);
  G1 = dense(inst.G1, n2);
  b1 = dense(inst.b1);
  A2 = dense(inst.A2, n1);
  G2 = dense(inst.G2, n2);
  b2 = dense(inst.b2);
  lower = dense(inst.lower);
  upper.resize(num_vars());
  for (int j = 0; j < num_vars(); ++j) upper[j] = to_double(*inst.upper[j]);
  unit_relaxation = integrality_guaranteed(inst);
}

bool is_integral(double v, double tol) { return std::abs(v - std::round(v)) <= tol; }

bool in_P(const NumericInstance& inst, const Point& p, double tol) {
  if (static_cast<int>(p.x.size()) != inst.n1 || static_cast<int>(p.y.size()) != inst.n2) return false;
  Eigen::VectorXd x = to_eigen(p.x);
  Eigen::VectorXd y = to_eigen(p.y);
  for (int j = 0; j < inst.n1; ++j) {
    if (x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol) return false;
  }
  for (int j = 0; j < inst.n2; ++j) {
    if (y[j] < inst.y_lower(j) - tol || y[j] > inst.y_upper(j) + tol) return false;
  }
  if (inst.m1() > 0 && ((inst.A1 * x + inst.G1 * y - inst.b1).array() < -tol).any()) return false;
  if (inst.m2() > 0 && ((inst.A2 * x + inst.G2 * y - inst.b2).array() < -tol).any()) return false;
  return true;
}

bool in_S(const NumericInstance& inst, const Point& p, double tol) {
  if (!in_P(inst, p, tol)) return false;
  for (int j = 0; j < inst.r1; ++j) {
    if (!is_integral(p.x[j])) return false;
  }
  for (int j = 0; j < inst.r2; ++j) {
    if (!is_integral(p.y[j])) return false;
  }
  return true;
}

LpProblem relaxation_lp(const NumericInstance& inst) {
  const int n = inst.num_vars();
  LpProblem lp(n);
  lp.objective.head(inst.n1) = inst.c;
  lp.objective.tail(inst.n2) = inst.d1;
  lp.lower = inst.lower;
  lp.upper = inst.upper;
  auto add_block = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& g, const Eigen::VectorXd& b) {
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      Eigen::VectorXd row(n);
      row.head(inst.n1) = a.row(i).transpose();
      row.tail(inst.n2) = g.row(i).transpose();
      lp.add_row(row, b[i]);
    }
  };
  add_block(inst.A1, inst.G1, inst.b1);
  add_block(inst.A2, inst.G2, inst.b2);
  return lp;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace miblp
