#include "miblp/bnc.hpp"

#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace miblp {

namespace {

constexpr double kGapTol = 1e-6;
constexpr double kCutViolation = 1e-7;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.parent_bound != b.parent_bound) return a.parent_bound > b.parent_bound;
    return a.id > b.id;
  }
};

}  // namespace

const char* to_string(OracleMode mode) { return mode == OracleMode::ImprovingDirection ? "id" : "legacy"; }

const char* to_string(BranchStrategy strategy) {
  return strategy == BranchStrategy::Fractional ? "fractional" : "linking";
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::LimitReached: return "LimitReached";
  }
  return "?";
}

void SolverConfig::check() const {
  oracle.check();
  if (max_cut_rounds < 0) throw std::invalid_argument("solver: max cut rounds must be nonnegative");
  if (tailing_off_rounds < 1) throw std::invalid_argument("solver: tailing-off rounds must be positive");
  if (!(time_limit >= 0.0)) throw std::invalid_argument("solver: time limit must be nonnegative");
  if (node_limit < 1) throw std::invalid_argument("solver: node limit must be positive");
}

double relative_gap(double upper, double lower) {
  if (!std::isfinite(upper)) return std::numeric_limits<double>::infinity();
  if (lower >= upper) return 0.0;
  return (upper - lower) / std::max(1.0, std::abs(upper));
}

std::optional<BranchDecision> choose_branch_variable(const NumericInstance& inst, const Eigen::VectorXd& z,
                                                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                                     BranchStrategy strategy) {
  if (strategy == BranchStrategy::LinkingPriority) {
    int best = -1;
    double best_distance = 2.0;
    for (int j = 0; j < inst.r1; ++j) {
      if (!inst.is_linking(j) || upper[j] - lower[j] < 0.5) continue;
      double frac = z[j] - std::floor(z[j]);
      if (std::min(frac, 1.0 - frac) <= kIntTol) frac = 0.0;
      double distance = std::abs(frac - 0.5);
      if (distance < best_distance) {
        best_distance = distance;
        best = j;
      }
    }
    if (best >= 0) {
      BranchDecision d;
      d.var = best;
      double v = z[best];
      if (is_integral(v)) {
        v = std::round(v);
        if (v >= upper[best]) v -= 1.0;  // keep both children nonempty
        d.down_upper = v;
        d.up_lower = v + 1.0;
      } else {
        d.down_upper = std::floor(v);
        d.up_lower = std::ceil(v);
      }
      return d;
    }
  }

  int best = -1;
  double best_distance = 1.0;
  const int n = inst.num_vars();
  for (int j = 0; j < n; ++j) {
    bool integer = j < inst.n1 ? j < inst.r1 : j - inst.n1 < inst.r2;
    if (!integer) continue;
    double frac = z[j] - std::floor(z[j]);
    if (std::min(frac, 1.0 - frac) <= kIntTol) continue;
    double distance = std::abs(frac - 0.5);
    if (distance < best_distance) {
      best_distance = distance;
      best = j;
    }
  }
  if (best < 0) return std::nullopt;
  return BranchDecision{best, std::floor(z[best]), std::ceil(z[best])};
}

BranchAndCut::BranchAndCut(const MiblpInstance& inst, SolverConfig cfg)
    : inst_(inst.has_finite_bounds() ? inst : finalize_bounds(inst)), num_(inst_), cfg_(std::move(cfg)) {
  cfg_.check();
  const int n = num_.num_vars();
  base_ = relaxation_lp(num_);

  root_lower_ = num_.lower;
  root_upper_ = num_.upper;
  integer_objective_ = true;
  for (int j = 0; j < n; ++j) {
    bool integer = j < num_.n1 ? j < num_.r1 : j - num_.n1 < num_.r2;
    if (integer) {
      root_lower_[j] = std::ceil(root_lower_[j] - kIntTol);
      root_upper_[j] = std::floor(root_upper_[j] + kIntTol);
    }
    double coef = base_.objective[j];
    if (coef != 0.0 && (!integer || coef != std::round(coef))) integer_objective_ = false;
  }
}

Node BranchAndCut::root() const {
  Node node;
  node.lower = root_lower_;
  node.upper = root_upper_;
  return node;
}

bool BranchAndCut::time_up() const {
  return std::isfinite(cfg_.time_limit) && now_seconds() - start_ > cfg_.time_limit;
}

LpProblem BranchAndCut::node_lp(const Node& node, std::vector<int>& row_cut) const {
  LpProblem lp = base_;
  lp.lower = node.lower;
  lp.upper = node.upper;
  row_cut.assign(static_cast<std::size_t>(base_.num_rows()), -1);
  auto append = [&](int index) {
    const Cut& cut = cuts_[static_cast<std::size_t>(index)].cut;
    Eigen::VectorXd row(num_.num_vars());
    for (int j = 0; j < num_.n1; ++j) row[j] = cut.alpha_x[j];
    for (int j = 0; j < num_.n2; ++j) row[num_.n1 + j] = cut.alpha_y[j];
    lp.add_row(row, cut.beta);
    row_cut.push_back(index);
  };
  for (int index : node.active_cuts) append(index);
  for (int index : node.local_cuts) append(index);
  return lp;
}

int BranchAndCut::separate_pool(Node& node, const Eigen::VectorXd& z) const {
  std::vector<bool> loaded(cuts_.size(), false);
  for (int index : node.active_cuts) loaded[static_cast<std::size_t>(index)] = true;
  int added = 0;
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    if (loaded[i] || cuts_[i].local) continue;
    if (cut_violation(cuts_[i].cut, z) > kFeasTol) {
      node.active_cuts.push_back(static_cast<int>(i));
      ++added;
    }
  }
  return added;
}

void BranchAndCut::keep_tight_cuts(Node& node, const Eigen::VectorXd& z) const {
  std::vector<int> kept;
  for (int index : node.active_cuts) {
    if (cut_violation(cuts_[static_cast<std::size_t>(index)].cut, z) > -1e-4) kept.push_back(index);
  }
  node.active_cuts = std::move(kept);
}

std::optional<LpSolution> BranchAndCut::solve_node_lp(const LpProblem& lp) {
  ++result_.stats.lp_solves;
  LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::Optimal || sol.status == LpStatus::Infeasible) return sol;
  SimplexOptions retry;
  retry.force_bland = true;
  retry.refactor_interval = 10;
  ++result_.stats.lp_solves;
  sol = solve_lp(lp, retry);
  if (sol.status == LpStatus::Optimal || sol.status == LpStatus::Infeasible) return sol;
  return std::nullopt;
}

Eigen::VectorXd BranchAndCut::snap(const Eigen::VectorXd& z) const {
  Eigen::VectorXd out = z;
  for (int j = 0; j < num_.r1; ++j) {
    if (is_integral(out[j])) out[j] = std::round(out[j]);
  }
  for (int j = 0; j < num_.r2; ++j) {
    if (is_integral(out[num_.n1 + j])) out[num_.n1 + j] = std::round(out[num_.n1 + j]);
  }
  return out;
}

bool BranchAndCut::integral(const Eigen::VectorXd& z) const {
  for (int j = 0; j < num_.r1; ++j) {
    if (!is_integral(z[j])) return false;
  }
  for (int j = 0; j < num_.r2; ++j) {
    if (!is_integral(z[num_.n1 + j])) return false;
  }
  return true;
}

Point BranchAndCut::split(const Eigen::VectorXd& z) const {
  Point p;
  p.x.assign(z.data(), z.data() + num_.n1);
  p.y.assign(z.data() + num_.n1, z.data() + num_.num_vars());
  return p;
}

double BranchAndCut::objective(const Eigen::VectorXd& z) const { return base_.objective.dot(z); }

double BranchAndCut::prune_threshold() const {
  if (!result_.has_incumbent) return std::numeric_limits<double>::infinity();
  return result_.value - kGapTol * std::max(1.0, std::abs(result_.value));
}

double BranchAndCut::round_bound(double lp_value) const {
  return integer_objective_ ? std::ceil(lp_value - kGapTol * std::max(1.0, std::abs(lp_value))) : lp_value;
}

bool BranchAndCut::cone_is_local(const SimplicialCone& cone, const LpSolution& sol, const Node& node,
                                 const std::vector<int>& row_cut) const {
  const int n = num_.num_vars();
  for (int source : cone.ray_source) {
    if (source < n) {
      BasisStatus st = sol.basis[static_cast<std::size_t>(source)];
      if (st == BasisStatus::AtLower && node.lower[source] != root_lower_[source]) return true;
      if (st == BasisStatus::AtUpper && node.upper[source] != root_upper_[source]) return true;
    } else {
      int cut = row_cut[static_cast<std::size_t>(source - n)];
      if (cut >= 0 && cuts_[static_cast<std::size_t>(cut)].local) return true;
    }
  }
  return false;
}

int BranchAndCut::add_cuts_from(const BilevelFreeSet& set, const SimplicialCone& cone,
                                const std::vector<bool>& local_source, const Eigen::VectorXd& vertex, Node& node,
                                bool& cone_inside) {
  CutResult res = intersection_cut(cone, set, num_.n1);
  if (res.status == CutResult::Status::ConeInsideFreeSet) {
    cone_inside = true;
    return 0;
  }
  if (res.status != CutResult::Status::Generated) return 0;
  if (cut_violation(res.cut, vertex) <= kCutViolation) return 0;
  res.cut.local = local_source.front();
  if (set.family == CutFamily::Idic) {
    double norm = 0.0;
    for (double v : set.generator) norm += std::abs(v);
    res.cut.norm_of_direction = static_cast<int>(std::lround(norm));
    ++result_.stats.idic_cuts;
  } else {
    ++result_.stats.isic_cuts;
  }
  if (cfg_.record_cuts) result_.cuts.push_back({res.cut, node.lower, node.upper});
  cuts_.push_back({res.cut, res.cut.local});
  if (res.cut.local) {
    node.local_cuts.push_back(static_cast<int>(cuts_.size()) - 1);
  } else {
    node.active_cuts.push_back(static_cast<int>(cuts_.size()) - 1);
  }
  return 1;
}

NodeBound BranchAndCut::bound_node(Node& node) {
  NodeBound out;
  out.bound = node.parent_bound;
  for (Eigen::Index j = 0; j < node.lower.size(); ++j) {
    if (node.lower[j] > node.upper[j]) {
      out.bound = std::numeric_limits<double>::infinity();
      out.reason = "empty-box";
      return out;
    }
  }

  std::vector<int> row_cut;
  double last_bound = -std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int round = 0;; ++round) {
    LpProblem lp = node_lp(node, row_cut);
    std::optional<LpSolution> sol = solve_node_lp(lp);
    if (!sol) {
      ++result_.stats.inconclusive;
      out.outcome = NodeBound::Outcome::Branch;
      out.reason = "lp-failure";
      return out;
    }
    if (sol->status == LpStatus::Infeasible) {
      out.outcome = NodeBound::Outcome::Pruned;
      out.bound = std::numeric_limits<double>::infinity();
      out.reason = "infeasible";
      return out;
    }
    if (separate_pool(node, sol->x) > 0) {
      --round;
      continue;
    }
    out.bound = std::max(node.parent_bound, round_bound(sol->objective));
    if (out.bound >= prune_threshold()) {
      out.outcome = NodeBound::Outcome::Pruned;
      out.reason = "bound";
      return out;
    }
    const Eigen::VectorXd z = snap(sol->x);
    out.point = z;
    const bool is_int = integral(z);
    const Point p = split(z);

    Direction direction;
    std::optional<std::vector<double>> improving_solution;
    if (cfg_.oracle_mode == OracleMode::Legacy) {
      if (!is_int) {
        out.outcome = NodeBound::Outcome::Branch;
        out.reason = "fractional";
        return out;
      }
      FollowerSolution follower;
      try {
        follower = solve_follower(num_, p.x, cfg_.oracle.limits, &result_.stats.oracle);
      } catch (const OracleInconclusive&) {
        ++result_.stats.inconclusive;
        out.outcome = NodeBound::Outcome::Branch;
        out.reason = "inconclusive";
        return out;
      }
      const double own = num_.d2.dot(to_eigen(p.y));
      if (!follower.feasible || own <= follower.value + 1e-9 * std::max(1.0, std::abs(follower.value))) {
        out.outcome = NodeBound::Outcome::Feasible;
        out.reason = "phi-check";
        return out;
      }
      std::vector<double> w(num_.n2);
      for (int j = 0; j < num_.n2; ++j) w[j] = follower.y[j] - p.y[j];
      direction = make_direction(num_, std::move(w));
      improving_solution = follower.y;
    } else {
      OracleOutcome outcome = find_improving_direction(num_, p, node.depth, cfg_.oracle, &result_.stats.oracle);
      switch (outcome.kind) {
        case OracleOutcome::Kind::NoImprovingDirection:
          out.outcome = is_int ? NodeBound::Outcome::Feasible : NodeBound::Outcome::Branch;
          out.reason = is_int ? "certified" : "no-direction";
          return out;
        case OracleOutcome::Kind::HeuristicExhausted:
          out.outcome = NodeBound::Outcome::Branch;
          out.reason = "heuristic-exhausted";
          return out;
        case OracleOutcome::Kind::Inconclusive:
          ++result_.stats.inconclusive;
          out.outcome = NodeBound::Outcome::Branch;
          out.reason = "inconclusive";
          return out;
        case OracleOutcome::Kind::Found:
          break;
      }
      direction = outcome.direction;
      std::vector<double> y_star(num_.n2);
      bool in_y = true;
      for (int j = 0; j < num_.n2; ++j) {
        y_star[j] = p.y[j] + direction.w[j];
        if (j < num_.r2 && !is_integral(y_star[j], 1e-9)) in_y = false;
      }
      if (in_y) improving_solution = std::move(y_star);
    }

    if (round >= cfg_.max_cut_rounds) {
      out.outcome = NodeBound::Outcome::Branch;
      out.reason = "max-rounds";
      return out;
    }

    SimplicialCone cone;
    try {
      cone = extract_cone(lp, *sol);
    } catch (const DegenerateCone&) {
      out.outcome = NodeBound::Outcome::Branch;
      out.reason = "degenerate-cone";
      return out;
    }
    const std::vector<bool> local{cone_is_local(cone, *sol, node, row_cut)};
    bool cone_inside = false;
    int added = 0;
    if (cfg_.use_idic) {
      added += add_cuts_from(bfs_from_direction(num_, direction.w), cone, local, sol->x, node, cone_inside);
    }
    if (cfg_.use_isic && improving_solution) {
      added += add_cuts_from(bfs_from_solution(num_, *improving_solution), cone, local, sol->x, node, cone_inside);
    }
    if (cone_inside) {
      out.outcome = NodeBound::Outcome::Pruned;
      out.bound = std::numeric_limits<double>::infinity();
      out.reason = "cone-inside-free-set";
      return out;
    }
    if (added == 0) {
      out.outcome = NodeBound::Outcome::Branch;
      out.reason = "no-violated-cut";
      return out;
    }
    out.cuts_added += added;

    if (round > 0 && out.bound - last_bound < cfg_.tailing_off_threshold) {
      if (++stalled >= cfg_.tailing_off_rounds) {
        out.outcome = NodeBound::Outcome::Branch;
        out.reason = "tailing-off";
        return out;
      }
    } else {
      stalled = 0;
    }
    last_bound = out.bound;
  }
}

void BranchAndCut::trace(const Node& node, double bound, const std::string& action) const {
  if (!cfg_.trace) return;
  *cfg_.trace << node.id << ' ' << node.depth << ' ' << bound << ' ' << action << '\n';
}

SolveResult BranchAndCut::solve() {
  start_ = now_seconds();
  result_ = SolveResult{};
  cuts_.clear();

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long next_id = 0;
  Node first = root();
  first.id = next_id++;
  open.push(std::move(first));
  bool unproven = false;
  bool limited = false;
  double limit_bound = std::numeric_limits<double>::infinity();

  auto admit = [&](const Eigen::VectorXd& z) {
    double value = objective(z);
    if (!result_.has_incumbent || value < result_.value) {
      result_.has_incumbent = true;
      result_.value = value;
      result_.incumbent = split(z);
      result_.incumbent_history.push_back(result_.incumbent);
    }
  };

  while (!open.empty()) {
    if (time_up() || result_.stats.nodes >= cfg_.node_limit) {
      limited = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.parent_bound >= prune_threshold()) {
      trace(node, node.parent_bound, "pruned-by-parent");
      continue;
    }
    ++result_.stats.nodes;
    NodeBound nb = bound_node(node);

    if (nb.outcome == NodeBound::Outcome::Pruned) {
      trace(node, nb.bound, "pruned:" + nb.reason);
      continue;
    }
    if (nb.outcome == NodeBound::Outcome::Feasible) {
      admit(nb.point);
      trace(node, nb.bound, "feasible:" + nb.reason);
      continue;
    }

    std::optional<BranchDecision> decision;
    if (nb.point.size() > 0) {
      decision = choose_branch_variable(num_, nb.point, node.lower, node.upper, cfg_.branching);
    }
    if (!decision) {
      // integral point without a cut: split an integer variable with room left
      const int n = num_.num_vars();
      for (int pass = 0; pass < 2 && !decision; ++pass) {
        for (int j = 0; j < n && !decision; ++j) {
          bool integer = j < num_.n1 ? j < num_.r1 : j - num_.n1 < num_.r2;
          if (!integer || node.upper[j] - node.lower[j] < 0.5) continue;
          if (pass == 0 && !(j < num_.n1 && num_.is_linking(j))) continue;
          double v = nb.point.size() > 0 ? std::round(nb.point[j]) : std::floor((node.lower[j] + node.upper[j]) / 2);
          v = std::clamp(v, node.lower[j], node.upper[j] - 1.0);
          decision = BranchDecision{j, v, v + 1.0};
        }
      }
    }
    if (!decision) {
      // every integer variable is fixed: the node holds a single integer part
      bool settled = false;
      if (nb.point.size() > 0 && in_S(num_, split(nb.point))) {
        try {
          if (certify_bilevel_feasible(num_, split(nb.point), cfg_.oracle.limits)) admit(nb.point);
          settled = true;
        } catch (const std::exception&) {
          settled = false;
        }
      }
      if (!settled) unproven = true;
      trace(node, nb.bound, settled ? "fixed-integers" : "unresolved");
      continue;
    }

    const std::string var = decision->var < num_.n1 ? "x" + std::to_string(decision->var)
                                                     : "y" + std::to_string(decision->var - num_.n1);
    trace(node, nb.bound, "branch:" + nb.reason + ":" + var);
    if (nb.point.size() > 0) keep_tight_cuts(node, nb.point);
    Node down = node;
    down.id = next_id++;
    down.depth = node.depth + 1;
    down.parent_bound = nb.bound;
    down.upper[decision->var] = decision->down_upper;
    Node up = node;
    up.id = next_id++;
    up.depth = node.depth + 1;
    up.parent_bound = nb.bound;
    up.lower[decision->var] = decision->up_lower;
    open.push(std::move(down));
    open.push(std::move(up));
  }

  while (!open.empty()) {
    limit_bound = std::min(limit_bound, open.top().parent_bound);
    open.pop();
  }

  result_.stats.seconds = now_seconds() - start_;
  if (limited || unproven) {
    result_.status = SolveStatus::LimitReached;
    result_.bound = std::min(limit_bound, result_.value);
    if (unproven) result_.bound = -std::numeric_limits<double>::infinity();
    result_.gap = relative_gap(result_.value, result_.bound);
  } else if (result_.has_incumbent) {
    result_.status = SolveStatus::Optimal;
    result_.bound = result_.value;
    result_.gap = 0.0;
  } else {
    result_.status = SolveStatus::Infeasible;
    result_.bound = std::numeric_limits<double>::infinity();
    result_.gap = 0.0;
  }
  return result_;
}

SolveResult solve(const MiblpInstance& inst, const SolverConfig& cfg) {
  ValidationReport report = validate_assumptions(inst);
  if (!report.bounded) throw std::invalid_argument("solve: the LP relaxation is unbounded");
  if (!report.linking_integer) throw std::invalid_argument("solve: a continuous leader variable is linking");
  BranchAndCut solver(inst, cfg);
  return solver.solve();
}

}  // namespace miblp
