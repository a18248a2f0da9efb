#include "miblp/oracle.hpp"

#include <chrono>
#include <cmath>

namespace miblp {

namespace {

constexpr double kTol = 1e-9;

struct IdLayout {
  int n2 = 0;
  bool split = false;
  int num_slack_terms = 0;

  int wp(int j) const { return n2 + j; }
  int wm(int j) const { return 2 * n2 + j; }
  int s(int i) const { return (split ? 3 * n2 : n2) + i; }
};

Eigen::VectorXd shifted_rhs(const NumericInstance& inst, const Point& point) {
  return inst.b2 - inst.A2 * to_eigen(point.x) - inst.G2 * to_eigen(point.y);
}

MilpProblem build_direction_milp(const NumericInstance& inst, const Point& point, std::optional<int> k,
                                 ObjectiveKind objective) {
  const int n2 = inst.n2;
  const int m2 = inst.m2();
  IdLayout layout;
  layout.n2 = n2;
  layout.split = k.has_value() || objective != ObjectiveKind::Steepest;
  layout.num_slack_terms = objective == ObjectiveKind::IdicFriendly ? m2 : 0;
  const int n = (layout.split ? 3 * n2 : n2) + layout.num_slack_terms;

  MilpProblem milp;
  LpProblem& lp = milp.lp;
  lp = LpProblem(n);

  Eigen::VectorXd magnitude(n2);
  for (int j = 0; j < n2; ++j) {
    lp.lower[j] = inst.y_lower(j) - point.y[j];
    lp.upper[j] = inst.y_upper(j) - point.y[j];
    magnitude[j] = std::max(std::abs(lp.lower[j]), std::abs(lp.upper[j]));
    if (j < inst.r2) milp.integers.push_back(j);
  }
  if (layout.split) {
    for (int j = 0; j < n2; ++j) {
      lp.lower[layout.wp(j)] = lp.lower[layout.wm(j)] = 0.0;
      lp.upper[layout.wp(j)] = lp.upper[layout.wm(j)] = magnitude[j];
    }
  }
  for (int i = 0; i < layout.num_slack_terms; ++i) {
    lp.lower[layout.s(i)] = 0.0;
    lp.upper[layout.s(i)] = inst.G2.row(i).cwiseAbs().dot(magnitude);
  }

  Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
  row.head(n2) = -inst.d2;
  lp.add_row(row, 1.0);

  Eigen::VectorXd rhs = shifted_rhs(inst, point);
  for (int i = 0; i < m2; ++i) {
    row.setZero();
    row.head(n2) = inst.G2.row(i).transpose();
    lp.add_row(row, rhs[i]);
  }

  if (layout.split) {
    for (int j = 0; j < n2; ++j) {
      row.setZero();
      row[j] = 1.0;
      row[layout.wp(j)] = -1.0;
      row[layout.wm(j)] = 1.0;
      lp.add_row(row, 0.0);
      lp.add_row(-row, 0.0);
    }
  }
  if (k) {
    row.setZero();
    for (int j = 0; j < n2; ++j) row[layout.wp(j)] = row[layout.wm(j)] = -1.0;
    lp.add_row(row, -static_cast<double>(*k));
  }
  for (int i = 0; i < layout.num_slack_terms; ++i) {
    row.setZero();
    row.head(n2) = -inst.G2.row(i).transpose();
    row[layout.s(i)] = 1.0;
    lp.add_row(row, 0.0);
  }

  lp.objective.setZero();
  switch (objective) {
    case ObjectiveKind::Steepest:
      lp.objective.head(n2) = inst.d2;
      break;
    case ObjectiveKind::IdicFriendly:
      for (int i = 0; i < layout.num_slack_terms; ++i) lp.objective[layout.s(i)] = 1.0;
      [[fallthrough]];
    case ObjectiveKind::Norm1:
      for (int j = 0; j < n2; ++j) lp.objective[layout.wp(j)] = lp.objective[layout.wm(j)] = 1.0;
      break;
  }
  return milp;
}

class ScopedTimer {
 public:
  explicit ScopedTimer(OracleStats* stats) : stats_(stats), start_(std::chrono::steady_clock::now()) {}
  ~ScopedTimer() {
    if (stats_) {
      stats_->ifd_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }
  }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  OracleStats* stats_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

const char* to_string(DirectionMethod method) {
  switch (method) {
    case DirectionMethod::ExactMilp: return "milp";
    case DirectionMethod::ExactMilpK: return "milp-k";
    case DirectionMethod::LocalSearch: return "local-search";
  }
  return "?";
}

const char* to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::Norm1: return "norm1";
    case ObjectiveKind::IdicFriendly: return "idic";
    case ObjectiveKind::Steepest: return "steepest";
  }
  return "?";
}

const char* to_string(OracleOutcome::Kind kind) {
  switch (kind) {
    case OracleOutcome::Kind::NoImprovingDirection: return "NoImprovingDirection";
    case OracleOutcome::Kind::Found: return "Found";
    case OracleOutcome::Kind::HeuristicExhausted: return "HeuristicExhausted";
    case OracleOutcome::Kind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

void OracleConfig::check() const {
  if (method != DirectionMethod::ExactMilp && k < 1) throw std::invalid_argument("oracle: k must be at least 1");
  if (depth_lb > depth_ub) throw std::invalid_argument("oracle: depth window lower bound exceeds upper bound");
}

Direction make_direction(const NumericInstance& inst, std::vector<double> w) {
  Direction d;
  for (int j = 0; j < inst.r2; ++j) w[j] = std::round(w[j]);
  d.w = std::move(w);
  d.norm1 = 0.0;
  d.improvement = 0.0;
  for (int j = 0; j < inst.n2; ++j) {
    d.norm1 += std::abs(d.w[j]);
    d.improvement += inst.d2[j] * d.w[j];
  }
  return d;
}

MilpProblem build_id_milp(const NumericInstance& inst, const Point& point, ObjectiveKind objective) {
  return build_direction_milp(inst, point, std::nullopt, objective);
}

MilpProblem build_k_id_milp(const NumericInstance& inst, const Point& point, int k, ObjectiveKind objective) {
  return build_direction_milp(inst, point, k, objective);
}

OracleOutcome solve_direction_milp(const NumericInstance& inst, const Point& point, std::optional<int> k,
                                   ObjectiveKind objective, const MilpLimits& limits, MilpMode mode) {
  OracleOutcome out;
  out.method = k ? DirectionMethod::ExactMilpK : DirectionMethod::ExactMilp;
  if (k && *k < 1) {
    out.kind = OracleOutcome::Kind::HeuristicExhausted;
    return out;
  }
  MilpProblem milp = build_direction_milp(inst, point, k, objective);
  milp.mode = mode;
  MilpSolution sol = solve_milp(milp, limits);
  switch (sol.status) {
    case MilpStatus::Optimal:
    case MilpStatus::FeasibleFound:
      out.kind = OracleOutcome::Kind::Found;
      out.direction = make_direction(inst, to_std(sol.x.head(inst.n2)));
      break;
    case MilpStatus::Infeasible:
      out.kind = k ? OracleOutcome::Kind::HeuristicExhausted : OracleOutcome::Kind::NoImprovingDirection;
      break;
    case MilpStatus::LimitReached:
      out.kind = OracleOutcome::Kind::Inconclusive;
      break;
  }
  return out;
}

DirectionScore objective_score(const NumericInstance& inst, const Point& point, ObjectiveKind objective) {
  (void)point;
  switch (objective) {
    case ObjectiveKind::Norm1:
      return [](const std::vector<double>& w) {
        double s = 0.0;
        for (double v : w) s += std::abs(v);
        return s;
      };
    case ObjectiveKind::IdicFriendly:
      return [&inst](const std::vector<double>& w) {
        Eigen::VectorXd gw = inst.G2 * to_eigen(w);
        double s = 0.0;
        for (Eigen::Index i = 0; i < gw.size(); ++i) s += std::max(gw[i], 0.0);
        for (double v : w) s += std::abs(v);
        return s;
      };
    case ObjectiveKind::Steepest:
      return [&inst](const std::vector<double>& w) { return inst.d2.dot(to_eigen(w)); };
  }
  throw std::invalid_argument("unknown objective kind");
}

OracleOutcome local_search_neighbors(const NumericInstance& inst, int k, const Point& point,
                                     ObjectiveKind objective) {
  return local_search_neighbors(inst, k, point, objective_score(inst, point, objective),
                                objective == ObjectiveKind::Norm1);
}

OracleOutcome local_search_neighbors(const NumericInstance& inst, int k, const Point& point,
                                     const DirectionScore& score, bool stop_at_first) {
  OracleOutcome out;
  out.method = DirectionMethod::LocalSearch;
  out.kind = OracleOutcome::Kind::HeuristicExhausted;
  const int n2 = inst.n2;
  const int r2 = inst.r2;
  if (r2 == 0 || k < 1) return out;

  std::vector<long long> lo(r2), hi(r2);
  for (int j = 0; j < r2; ++j) {
    lo[j] = static_cast<long long>(std::ceil(inst.y_lower(j) - point.y[j] - kTol));
    hi[j] = static_cast<long long>(std::floor(inst.y_upper(j) - point.y[j] + kTol));
  }
  const Eigen::VectorXd rhs = shifted_rhs(inst, point);
  const Eigen::MatrixXd g_int = inst.G2.leftCols(r2);
  const Eigen::VectorXd d_int = inst.d2.head(r2);

  std::vector<double> w(n2, 0.0);
  Eigen::VectorXd wi(r2);
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  auto consider = [&]() {
    for (int j = 0; j < r2; ++j) wi[j] = w[j];
    if (d_int.dot(wi) > -1.0 + kTol) return;
    if (inst.m2() > 0) {
      Eigen::VectorXd gw = g_int * wi;
      for (int i = 0; i < inst.m2(); ++i) {
        if (gw[i] < rhs[i] - kTol * std::max(1.0, std::abs(rhs[i]))) return;
      }
    }
    double value = score(w);
    if (!found || value < best) {
      best = value;
      found = true;
      out.direction = make_direction(inst, w);
    }
  };

  // all vectors with |w|_1 == remaining on coordinates idx.., ascending lexicographically
  std::function<bool(int, long long)> shell = [&](int idx, long long remaining) -> bool {
    if (idx == r2 - 1) {
      for (long long v : {-remaining, remaining}) {
        if (v < lo[idx] || v > hi[idx]) continue;
        w[idx] = static_cast<double>(v);
        consider();
        if (found && stop_at_first) return true;
        if (remaining == 0) break;
      }
      w[idx] = 0.0;
      return false;
    }
    for (long long v = std::max(lo[idx], -remaining); v <= std::min(hi[idx], remaining); ++v) {
      w[idx] = static_cast<double>(v);
      if (shell(idx + 1, remaining - std::abs(v))) return true;
    }
    w[idx] = 0.0;
    return false;
  };

  long long reach = 0;
  for (int j = 0; j < r2; ++j) reach += std::max(std::abs(lo[j]), std::abs(hi[j]));
  const long long radius = std::min<long long>(k, reach);
  for (long long s = 1; s <= radius; ++s) {
    if (shell(0, s)) break;
  }
  if (found) out.kind = OracleOutcome::Kind::Found;
  return out;
}

OracleOutcome find_improving_direction(const NumericInstance& inst, const Point& point, int depth,
                                       const OracleConfig& cfg, OracleStats* stats) {
  ScopedTimer timer(stats);
  if (stats) ++stats->ifd_calls;
  const bool in_window = depth >= cfg.depth_lb && depth <= cfg.depth_ub;
  if (cfg.method != DirectionMethod::ExactMilp && in_window) {
    OracleOutcome heuristic;
    if (cfg.method == DirectionMethod::LocalSearch) {
      if (stats) ++stats->local_search_calls;
      heuristic = local_search_neighbors(inst, cfg.k, point, cfg.objective);
    } else {
      if (stats) ++stats->k_milp_calls;
      heuristic = solve_direction_milp(inst, point, cfg.k, cfg.objective, cfg.limits);
    }
    if (heuristic.found()) return heuristic;
    if (!in_S(inst, point)) return heuristic;
  }
  if (stats) ++stats->exact_calls;
  return solve_direction_milp(inst, point, std::nullopt, cfg.objective, cfg.limits);
}

bool certify_bilevel_feasible(const NumericInstance& inst, const Point& point, const MilpLimits& limits) {
  if (!in_S(inst, point)) throw PointNotInS("certify_bilevel_feasible: point is not in S");
  OracleOutcome out =
      solve_direction_milp(inst, point, std::nullopt, ObjectiveKind::Steepest, limits, MilpMode::FirstFeasible);
  if (out.kind == OracleOutcome::Kind::Inconclusive) throw OracleInconclusive("certify_bilevel_feasible: limit reached");
  return out.kind == OracleOutcome::Kind::NoImprovingDirection;
}

bool k_id_feasible(const NumericInstance& inst, const Point& point, int k, const MilpLimits& limits) {
  OracleOutcome out = solve_direction_milp(inst, point, k, ObjectiveKind::Steepest, limits, MilpMode::FirstFeasible);
  if (out.kind == OracleOutcome::Kind::Inconclusive) throw OracleInconclusive("k_id_feasible: limit reached");
  return out.found();
}

FollowerSolution solve_follower(const NumericInstance& inst, const std::vector<double>& x,
                                const MilpLimits& limits, OracleStats* stats) {
  if (stats) ++stats->phi_calls;
  const int n2 = inst.n2;
  MilpProblem milp;
  milp.lp = LpProblem(n2);
  milp.lp.objective = inst.d2;
  milp.lp.lower = inst.lower.tail(n2);
  milp.lp.upper = inst.upper.tail(n2);
  Eigen::VectorXd rhs = inst.b2 - inst.A2 * to_eigen(x);
  for (int i = 0; i < inst.m2(); ++i) milp.lp.add_row(inst.G2.row(i).transpose(), rhs[i]);
  for (int j = 0; j < inst.r2; ++j) milp.integers.push_back(j);
  MilpSolution sol = solve_milp(milp, limits);
  FollowerSolution out;
  switch (sol.status) {
    case MilpStatus::Optimal:
    case MilpStatus::FeasibleFound:
      out.feasible = true;
      out.value = sol.objective;
      out.y = to_std(sol.x);
      return out;
    case MilpStatus::Infeasible:
      return out;
    case MilpStatus::LimitReached:
      break;
  }
  throw OracleInconclusive("follower problem: limit reached");
}

double evaluate_phi(const NumericInstance& inst, const std::vector<double>& x, const MilpLimits& limits,
                    OracleStats* stats) {
  return solve_follower(inst, x, limits, stats).value;
}

bool legacy_feasibility_check(const NumericInstance& inst, const Point& point, const MilpLimits& limits,
                              OracleStats* stats) {
  if (!in_S(inst, point)) throw PointNotInS("legacy_feasibility_check: point is not in S");
  double phi = evaluate_phi(inst, point.x, limits, stats);
  double value = inst.d2.dot(to_eigen(point.y));
  return value <= phi + 1e-9 * std::max(1.0, std::abs(phi));
}

}  // namespace miblp
