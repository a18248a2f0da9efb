#include "miblp/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace miblp {

namespace {

constexpr double kIntegralityTol = 1e-6;
constexpr double kRowTol = 1e-9;

struct Node {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double bound = -std::numeric_limits<double>::infinity();
  long id = 0;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

double prune_tolerance(double value) { return 1e-9 * std::max(1.0, std::abs(value)); }

class BranchAndBound {
 public:
  BranchAndBound(const MilpProblem& problem, const MilpLimits& limits)
      : p_(problem), limits_(limits), work_(problem.lp), start_(std::chrono::steady_clock::now()) {}

  MilpSolution run() {
    Node root{p_.lp.lower, p_.lp.upper, -std::numeric_limits<double>::infinity(), next_id_++};
    for (int j : p_.integers) {
      root.lower[j] = std::ceil(root.lower[j] - kIntegralityTol);
      root.upper[j] = std::floor(root.upper[j] + kIntegralityTol);
    }
    stack_.push_back(std::move(root));

    while (!stack_.empty() || !heap_.empty()) {
      if (out_of_limits()) {
        hit_limit_ = true;
        break;
      }
      Node node = pop();
      if (node.bound >= threshold() - prune_tolerance(threshold())) continue;
      ++result_.nodes;
      process(node);
      if (done_) break;
    }

    if (done_) {
      result_.status = MilpStatus::FeasibleFound;
    } else if (hit_limit_ || unstable_) {
      result_.status = MilpStatus::LimitReached;
    } else {
      result_.status = result_.has_incumbent() ? MilpStatus::Optimal : MilpStatus::Infeasible;
    }
    return result_;
  }

 private:
  double threshold() const {
    double t = result_.objective;
    if (p_.cutoff) t = std::min(t, *p_.cutoff);
    return t;
  }

  bool out_of_limits() const {
    if (result_.nodes >= limits_.max_nodes) return true;
    if (std::isfinite(limits_.time_limit)) {
      double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > limits_.time_limit) return true;
    }
    return false;
  }

  Node pop() {
    if (!stack_.empty()) {
      Node node = std::move(stack_.back());
      stack_.pop_back();
      return node;
    }
    Node node = heap_.top();
    heap_.pop();
    return node;
  }

  void push(Node node) {
    if (result_.has_incumbent()) {
      heap_.push(std::move(node));
    } else {
      stack_.push_back(std::move(node));
    }
  }

  void process(const Node& node) {
    for (Eigen::Index j = 0; j < node.lower.size(); ++j) {
      if (node.lower[j] > node.upper[j]) return;
    }
    work_.lower = node.lower;
    work_.upper = node.upper;
    LpSolution lp = solve_lp(work_);
    if (lp.status == LpStatus::Infeasible) return;
    if (lp.status != LpStatus::Optimal) {
      unstable_ = true;
      return;
    }
    if (lp.objective >= threshold() - prune_tolerance(threshold())) return;

    int branch = -1;
    double best_distance = 1.0;
    for (int j : p_.integers) {
      double frac = lp.x[j] - std::floor(lp.x[j]);
      if (std::min(frac, 1.0 - frac) <= kIntegralityTol) continue;
      double distance = std::abs(frac - 0.5);
      if (distance < best_distance) {
        best_distance = distance;
        branch = j;
      }
    }

    if (branch < 0) {
      accept_integral(lp.x);
      return;
    }

    double v = lp.x[branch];
    Node down{node.lower, node.upper, lp.objective, next_id_++};
    down.upper[branch] = std::floor(v);
    Node up{node.lower, node.upper, lp.objective, next_id_++};
    up.lower[branch] = std::ceil(v);
    // on the dive the child nearer to v is explored first (pushed last)
    if (v - std::floor(v) >= 0.5) {
      push(std::move(down));
      push(std::move(up));
    } else {
      push(std::move(up));
      push(std::move(down));
    }
  }

  void accept_integral(Eigen::VectorXd x) {
    for (int j : p_.integers) x[j] = std::round(x[j]);
    if (!rows_satisfied(x)) {
      if (p_.integers.size() == static_cast<std::size_t>(x.size())) return;
      // re-solve the continuous part with the integers fixed at their rounded values
      for (int j : p_.integers) work_.lower[j] = work_.upper[j] = x[j];
      LpSolution fixed = solve_lp(work_);
      if (fixed.status != LpStatus::Optimal) return;
      x = fixed.x;
      for (int j : p_.integers) x[j] = std::round(x[j]);
      if (!rows_satisfied(x)) return;
    }
    double value = p_.lp.objective.dot(x);
    if (value >= threshold() - prune_tolerance(threshold())) return;
    bool first = !result_.has_incumbent();
    result_.x = std::move(x);
    result_.objective = value;
    if (p_.mode == MilpMode::FirstFeasible) {
      done_ = true;
      return;
    }
    if (first) {
      // switch from diving to best-first
      for (auto& node : stack_) heap_.push(std::move(node));
      stack_.clear();
    }
  }

  bool rows_satisfied(const Eigen::VectorXd& x) const {
    if (p_.lp.num_rows() > 0) {
      Eigen::VectorXd residual = p_.lp.rows * x - p_.lp.rhs;
      for (Eigen::Index i = 0; i < residual.size(); ++i) {
        if (residual[i] < -kRowTol * std::max(1.0, std::abs(p_.lp.rhs[i]))) return false;
      }
    }
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      if (x[j] < p_.lp.lower[j] - kRowTol || x[j] > p_.lp.upper[j] + kRowTol) return false;
    }
    return true;
  }

  const MilpProblem& p_;
  MilpLimits limits_;
  LpProblem work_;
  std::chrono::steady_clock::time_point start_;
  std::vector<Node> stack_;
  std::priority_queue<Node, std::vector<Node>, WorseNode> heap_;
  MilpSolution result_;
  long next_id_ = 0;
  bool hit_limit_ = false;
  bool unstable_ = false;
  bool done_ = false;
};

}  // namespace

void MilpProblem::check() const {
  lp.check();
  for (std::size_t i = 0; i < integers.size(); ++i) {
    if (integers[i] < 0 || integers[i] >= lp.num_vars()) {
      throw std::invalid_argument("MilpProblem: integer index out of range");
    }
    if (i > 0 && integers[i] <= integers[i - 1]) {
      throw std::invalid_argument("MilpProblem: integer indices must be sorted and unique");
    }
  }
}

const char* to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::Optimal: return "Optimal";
    case MilpStatus::Infeasible: return "Infeasible";
    case MilpStatus::FeasibleFound: return "FeasibleFound";
    case MilpStatus::LimitReached: return "LimitReached";
  }
  return "?";
}

MilpSolution solve_milp(const MilpProblem& problem, const MilpLimits& limits) {
  problem.check();
  return BranchAndBound(problem, limits).run();
}

}  // namespace miblp
