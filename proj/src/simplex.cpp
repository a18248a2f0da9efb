#include "miblp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace miblp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;

enum class ColumnKind : std::uint8_t { Structural, Slack, Artificial };

// Dense bounded-variable revised primal simplex over
//   rows·z - s + a = rhs,  lower <= z <= upper,  s >= 0,  a >= 0 (phase 1 only).
class BoundedPrimalSimplex {
 public:
  BoundedPrimalSimplex(const LpProblem& problem, const SimplexOptions& options)
      : p_(problem), opt_(options), n_(problem.num_vars()), m_(problem.num_rows()) {}

  LpSolution run() {
    LpSolution result;
    setup_phase_one();

    if (num_artificial_ > 0) {
      cost_.setZero(total_);
      for (int j = n_ + m_; j < total_; ++j) cost_[j] = 1.0;
      LpStatus st = iterate();
      if (st != LpStatus::Optimal) return finish(result, st);
      double infeasibility = 0.0;
      for (int j = n_ + m_; j < total_; ++j) infeasibility += value_[j];
      double scale = 1.0 + p_.rhs.cwiseAbs().maxCoeff();
      if (infeasibility > 1e-9 * scale) return finish(result, LpStatus::Infeasible);
      drive_out_artificials();
    }

    cost_.setZero(total_);
    cost_.head(n_) = p_.objective;
    LpStatus st = iterate();
    for (int attempt = 0; st == LpStatus::Optimal && attempt < 2; ++attempt) {
      refactor();
      compute_basic_values();
      if (primal_feasible()) return finish(result, LpStatus::Optimal);
      st = iterate();
    }
    if (st == LpStatus::Optimal) st = LpStatus::NumericallyUnstable;
    return finish(result, st);
  }

 private:
  void setup_phase_one() {
    // structurals start at their lower bound; rows that the start point
    // violates get an artificial column
    Eigen::VectorXd z0 = p_.lower;
    Eigen::VectorXd residual = m_ > 0 ? Eigen::VectorXd(p_.rows * z0 - p_.rhs) : Eigen::VectorXd();
    artificial_row_.clear();
    for (int i = 0; i < m_; ++i) {
      if (residual[i] < 0.0) artificial_row_.push_back(i);
    }
    num_artificial_ = static_cast<int>(artificial_row_.size());
    total_ = n_ + m_ + num_artificial_;

    lo_.resize(total_);
    hi_.resize(total_);
    value_.setZero(total_);
    kind_.assign(total_, ColumnKind::Structural);
    status_.assign(total_, BasisStatus::AtLower);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = p_.lower[j];
      hi_[j] = p_.upper[j];
      value_[j] = p_.lower[j];
    }
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = 0.0;
      hi_[n_ + i] = kInf;
      kind_[n_ + i] = ColumnKind::Slack;
    }
    for (int k = 0; k < num_artificial_; ++k) {
      lo_[n_ + m_ + k] = 0.0;
      hi_[n_ + m_ + k] = kInf;
      kind_[n_ + m_ + k] = ColumnKind::Artificial;
    }

    basis_.assign(m_, -1);
    for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
    for (int k = 0; k < num_artificial_; ++k) basis_[artificial_row_[k]] = n_ + m_ + k;
    for (int col : basis_) status_[col] = BasisStatus::Basic;

    refactor();
    compute_basic_values();
  }

  // B^{-1} times column j
  Eigen::VectorXd ftran(int j) const {
    switch (kind_[j]) {
      case ColumnKind::Structural:
        return binv_ * p_.rows.col(j);
      case ColumnKind::Slack:
        return -binv_.col(j - n_);
      case ColumnKind::Artificial:
        return binv_.col(artificial_row_[j - n_ - m_]);
    }
    return {};
  }

  double column_dot(const Eigen::VectorXd& y, int j) const {
    switch (kind_[j]) {
      case ColumnKind::Structural:
        return y.dot(p_.rows.col(j));
      case ColumnKind::Slack:
        return -y[j - n_];
      case ColumnKind::Artificial:
        return y[artificial_row_[j - n_ - m_]];
    }
    return 0.0;
  }

  bool refactor() {
    pivots_since_refactor_ = 0;
    if (m_ == 0) {
      binv_.resize(0, 0);
      return true;
    }
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (int r = 0; r < m_; ++r) {
      int j = basis_[r];
      switch (kind_[j]) {
        case ColumnKind::Structural:
          b.col(r) = p_.rows.col(j);
          break;
        case ColumnKind::Slack:
          b(j - n_, r) = -1.0;
          break;
        case ColumnKind::Artificial:
          b(artificial_row_[j - n_ - m_], r) = 1.0;
          break;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (!lu.isInvertible()) return false;
    binv_ = lu.inverse();
    return true;
  }

  void compute_basic_values() {
    if (m_ == 0) return;
    Eigen::VectorXd rhs = p_.rhs;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == BasisStatus::Basic || value_[j] == 0.0) continue;
      switch (kind_[j]) {
        case ColumnKind::Structural:
          rhs -= p_.rows.col(j) * value_[j];
          break;
        case ColumnKind::Slack:
          rhs[j - n_] += value_[j];
          break;
        case ColumnKind::Artificial:
          rhs[artificial_row_[j - n_ - m_]] -= value_[j];
          break;
      }
    }
    Eigen::VectorXd xb = binv_ * rhs;
    for (int r = 0; r < m_; ++r) value_[basis_[r]] = xb[r];
  }

  bool primal_feasible() const {
    for (int j = 0; j < total_; ++j) {
      double tol = opt_.feasibility_tol * std::max(1.0, std::abs(value_[j]));
      if (value_[j] < lo_[j] - tol || value_[j] > hi_[j] + tol) return false;
    }
    if (m_ > 0) {
      Eigen::VectorXd z = value_.head(n_);
      Eigen::VectorXd res = p_.rows * z - p_.rhs;
      for (int i = 0; i < m_; ++i) {
        if (res[i] < -opt_.feasibility_tol * std::max(1.0, std::abs(p_.rhs[i]))) return false;
      }
    }
    return true;
  }

  void pivot(int row, int entering, const Eigen::VectorXd& alpha) {
    int leaving = basis_[row];
    double piv = alpha[row];
    Eigen::RowVectorXd pivot_row = binv_.row(row) / piv;
    for (int i = 0; i < m_; ++i) {
      if (i == row || alpha[i] == 0.0) continue;
      binv_.row(i) -= alpha[i] * pivot_row;
    }
    binv_.row(row) = pivot_row;
    basis_[row] = entering;
    status_[entering] = BasisStatus::Basic;
    // leaving variable snaps to the bound it reached
    double lv = value_[leaving];
    if (std::abs(lv - hi_[leaving]) < std::abs(lv - lo_[leaving])) {
      status_[leaving] = BasisStatus::AtUpper;
      value_[leaving] = hi_[leaving];
    } else {
      status_[leaving] = BasisStatus::AtLower;
      value_[leaving] = lo_[leaving];
    }
    if (++pivots_since_refactor_ >= opt_.refactor_interval) refactor();
  }

  LpStatus iterate() {
    bool bland = opt_.force_bland;
    int degenerate_run = 0;
    const int degenerate_limit = 3 * (m_ + n_);
    for (;;) {
      if (iterations_ >= opt_.max_iterations) return LpStatus::IterationLimit;
      ++iterations_;
      compute_basic_values();

      Eigen::VectorXd y(m_);
      for (int r = 0; r < m_; ++r) y[r] = cost_[basis_[r]];
      if (m_ > 0) y = (y.transpose() * binv_).transpose();

      // pricing
      int entering = -1;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (status_[j] == BasisStatus::Basic || hi_[j] - lo_[j] <= 0.0) continue;
        double d = cost_[j] - column_dot(y, j);
        double gain = 0.0;
        if (status_[j] == BasisStatus::AtLower && d < -opt_.optimality_tol) gain = -d;
        if (status_[j] == BasisStatus::AtUpper && d > opt_.optimality_tol) gain = d;
        if (gain <= 0.0) continue;
        if (bland) {
          entering = j;
          break;
        }
        if (gain > best) {
          best = gain;
          entering = j;
        }
      }
      if (entering < 0) return LpStatus::Optimal;

      const double sigma = status_[entering] == BasisStatus::AtLower ? 1.0 : -1.0;
      Eigen::VectorXd alpha = m_ > 0 ? ftran(entering) : Eigen::VectorXd();

      // ratio test; ties broken by lowest column index
      double step = hi_[entering] - lo_[entering];
      int leave_row = -1;
      for (int r = 0; r < m_; ++r) {
        double rate = -sigma * alpha[r];
        int col = basis_[r];
        double t = kInf;
        if (rate < -kPivotTol) {
          t = std::max(0.0, value_[col] - lo_[col]) / -rate;
        } else if (rate > kPivotTol && hi_[col] < kInf) {
          t = std::max(0.0, hi_[col] - value_[col]) / rate;
        } else {
          continue;
        }
        if (t < step - kDegenerateStep ||
            (leave_row >= 0 && t <= step + kDegenerateStep && col < basis_[leave_row])) {
          step = t;
          leave_row = r;
        }
      }
      if (step == kInf) return LpStatus::Unbounded;

      if (step <= kDegenerateStep) {
        if (++degenerate_run >= degenerate_limit) bland = true;
      } else {
        degenerate_run = 0;
      }

      if (leave_row < 0) {
        // bound flip
        value_[entering] = sigma > 0 ? hi_[entering] : lo_[entering];
        status_[entering] = sigma > 0 ? BasisStatus::AtUpper : BasisStatus::AtLower;
        continue;
      }
      value_[entering] += sigma * step;
      for (int r = 0; r < m_; ++r) value_[basis_[r]] -= sigma * step * alpha[r];
      pivot(leave_row, entering, alpha);
    }
  }

  void drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
      if (kind_[basis_[r]] != ColumnKind::Artificial) continue;
      Eigen::RowVectorXd row = binv_.row(r);
      int entering = -1;
      double best = kPivotTol;
      for (int j = 0; j < n_ + m_; ++j) {
        if (status_[j] == BasisStatus::Basic) continue;
        double entry = kind_[j] == ColumnKind::Structural ? row.dot(p_.rows.col(j)) : -row[j - n_];
        if (std::abs(entry) > best) {
          best = std::abs(entry);
          entering = j;
        }
      }
      if (entering < 0) continue;  // redundant row; artificial stays basic at zero
      Eigen::VectorXd alpha = ftran(entering);
      int leaving = basis_[r];
      pivot(r, entering, alpha);
      value_[leaving] = 0.0;
      compute_basic_values();
    }
    for (int k = 0; k < num_artificial_; ++k) {
      int j = n_ + m_ + k;
      hi_[j] = 0.0;
      if (status_[j] != BasisStatus::Basic) {
        value_[j] = 0.0;
        status_[j] = BasisStatus::AtLower;
      }
    }
  }

  LpSolution& finish(LpSolution& out, LpStatus status) {
    out.status = status;
    out.iterations = iterations_;
    out.x = value_.head(n_);
    out.objective = status == LpStatus::Optimal ? p_.objective.dot(out.x) : 0.0;
    out.basis.assign(status_.begin(), status_.begin() + n_ + m_);
    return out;
  }

  const LpProblem& p_;
  const SimplexOptions& opt_;
  int n_;
  int m_;
  int total_ = 0;
  int num_artificial_ = 0;
  int iterations_ = 0;
  int pivots_since_refactor_ = 0;
  std::vector<int> artificial_row_;
  std::vector<ColumnKind> kind_;
  std::vector<BasisStatus> status_;
  std::vector<int> basis_;
  Eigen::VectorXd lo_, hi_, value_, cost_;
  Eigen::MatrixXd binv_;
};

}  // namespace

LpProblem::LpProblem(int num_vars)
    : objective(Eigen::VectorXd::Zero(num_vars)),
      rows(0, num_vars),
      rhs(0),
      lower(Eigen::VectorXd::Zero(num_vars)),
      upper(Eigen::VectorXd::Zero(num_vars)) {}

void LpProblem::add_row(const Eigen::VectorXd& coefficients, double row_rhs) {
  if (coefficients.size() != num_vars()) throw std::invalid_argument("add_row: dimension mismatch");
  rows.conservativeResize(rows.rows() + 1, num_vars());
  rows.row(rows.rows() - 1) = coefficients.transpose();
  rhs.conservativeResize(rhs.size() + 1);
  rhs[rhs.size() - 1] = row_rhs;
}

void LpProblem::check() const {
  const auto n = objective.size();
  if (rows.cols() != n || lower.size() != n || upper.size() != n || rhs.size() != rows.rows()) {
    throw std::invalid_argument("LpProblem: inconsistent dimensions");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j])) {
      throw std::invalid_argument("LpProblem: variable bounds must be finite");
    }
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::NumericallyUnstable: return "NumericallyUnstable";
    case LpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
  problem.check();
  for (int j = 0; j < problem.num_vars(); ++j) {
    if (problem.lower[j] > problem.upper[j]) {
      LpSolution infeasible;
      infeasible.status = LpStatus::Infeasible;
      infeasible.x = problem.lower;
      return infeasible;
    }
  }
  LpSolution solution = BoundedPrimalSimplex(problem, options).run();
  if (solution.status == LpStatus::NumericallyUnstable && !options.force_bland) {
    // second attempt with a different pivoting sequence
    SimplexOptions retry = options;
    retry.force_bland = true;
    retry.refactor_interval = std::max(1, options.refactor_interval / 5);
    solution = BoundedPrimalSimplex(problem, retry).run();
  }
  return solution;
}

SimplicialCone extract_cone(const LpProblem& problem, const LpSolution& solution) {
  if (solution.status != LpStatus::Optimal) throw DegenerateCone("extract_cone: solution is not optimal");
  const int n = problem.num_vars();
  const int m = problem.num_rows();
  if (static_cast<int>(solution.basis.size()) != n + m) throw DegenerateCone("extract_cone: basis size mismatch");

  std::vector<int> basic;
  std::vector<int> nonbasic;
  for (int j = 0; j < n + m; ++j) {
    (solution.basis[j] == BasisStatus::Basic ? basic : nonbasic).push_back(j);
  }
  if (static_cast<int>(basic.size()) != m || static_cast<int>(nonbasic.size()) != n) {
    throw DegenerateCone("extract_cone: basis does not have one basic column per row");
  }

  auto column = [&](int j) -> Eigen::VectorXd {
    if (j < n) return problem.rows.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    e[j - n] = -1.0;
    return e;
  };

  Eigen::MatrixXd binv;
  if (m > 0) {
    Eigen::MatrixXd b(m, m);
    for (int r = 0; r < m; ++r) b.col(r) = column(basic[r]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
    if (!lu.isInvertible()) throw DegenerateCone("extract_cone: singular basis");
    binv = lu.inverse();
  }

  SimplicialCone cone;
  cone.vertex = solution.x;
  cone.rays = Eigen::MatrixXd::Zero(n, n);
  cone.ray_source = nonbasic;
  for (int k = 0; k < n; ++k) {
    int j = nonbasic[k];
    double sigma = solution.basis[j] == BasisStatus::AtUpper ? -1.0 : 1.0;
    if (j < n) cone.rays(j, k) = sigma;
    if (m > 0) {
      Eigen::VectorXd delta = -sigma * (binv * column(j));
      for (int r = 0; r < m; ++r) {
        if (basic[r] < n) cone.rays(basic[r], k) += delta[r];
      }
    }
  }
  if (n > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(cone.rays);
    lu.setThreshold(1e-9);
    if (lu.rank() < n) throw DegenerateCone("extract_cone: dependent rays");
  }
  return cone;
}

}  // namespace miblp
