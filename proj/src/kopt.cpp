#include "miblp/kopt.hpp"

#include "miblp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace miblp {

namespace {

std::int64_t l1_distance(const IntVector& a, const IntVector& b) {
  std::int64_t d = 0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

}  // namespace

int compute_k_bar(const MiblpInstance& inst) {
  if (!inst.has_finite_bounds()) throw std::runtime_error("compute_k_bar: finalize bounds first");
  const int n = inst.num_vars();
  LpProblem lp(n);
  for (int j = 0; j < n; ++j) {
    lp.lower[j] = inst.lower_d(j);
    lp.upper[j] = inst.upper_d(j);
  }
  auto add_block = [&](const RationalMatrix& a, const RationalMatrix& g, const RationalVector& b) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      Eigen::VectorXd row(n);
      for (int j = 0; j < inst.n1; ++j) row[j] = to_double(a[i][j]);
      for (int j = 0; j < inst.n2; ++j) row[inst.n1 + j] = to_double(g[i][j]);
      lp.add_row(row, to_double(b[i]));
    }
  };
  add_block(inst.A1, inst.G1, inst.b1);
  add_block(inst.A2, inst.G2, inst.b2);

  long long total = 0;
  for (int j = 0; j < inst.n2; ++j) {
    const int var = inst.n1 + j;
    double extreme[2];
    for (int side = 0; side < 2; ++side) {
      lp.objective.setZero();
      lp.objective[var] = side == 0 ? 1.0 : -1.0;
      LpSolution sol = solve_lp(lp);
      if (sol.status == LpStatus::Infeasible) return 0;
      if (sol.status != LpStatus::Optimal) {
        throw std::runtime_error("compute_k_bar: LP over P failed (" + std::string(to_string(sol.status)) + ")");
      }
      extreme[side] = sol.x[var];
    }
    if (inst.follower_is_integer(j)) {
      total += std::max(0LL, static_cast<long long>(std::floor(extreme[1] + 1e-7)) -
                                 static_cast<long long>(std::ceil(extreme[0] - 1e-7)));
    } else {
      total += static_cast<long long>(std::ceil(extreme[1] - extreme[0] - 1e-7));
    }
  }
  return static_cast<int>(total);
}

KoptContext::KoptContext(const MiblpInstance& inst, long long budget)
    : inst_(inst), model_(inst, budget), k_bar_(compute_k_bar(inst)) {}

const std::map<IntVector, std::optional<std::int64_t>>& KoptContext::levels(const IntVector& x) const {
  auto it = cache_.find(x);
  if (it != cache_.end()) return it->second;

  std::vector<IntVector> follower = model_.follower_set(x);
  std::vector<std::int64_t> key(follower.size());
  for (std::size_t i = 0; i < follower.size(); ++i) key[i] = model_.follower_key(follower[i]);

  std::map<IntVector, std::optional<std::int64_t>> out;
  for (std::size_t i = 0; i < follower.size(); ++i) {
    std::optional<std::int64_t> level;
    for (std::size_t t = 0; t < follower.size(); ++t) {
      if (key[t] >= key[i]) continue;
      std::int64_t d = l1_distance(follower[i], follower[t]);
      if (!level || d < *level) level = d;
    }
    out.emplace(follower[i], level);
  }
  return cache_.emplace(x, std::move(out)).first->second;
}

std::vector<IntVector> reaction_set_k(const KoptContext& ctx, const IntVector& x, int k) {
  std::vector<IntVector> out;
  for (const auto& [y, level] : ctx.levels(x)) {
    if (!ctx.model().leader_rows_hold(x, y)) continue;
    if (!level || *level > k) out.push_back(y);
  }
  return out;
}

std::vector<IntPoint> enumerate_Fk(const KoptContext& ctx, int k) {
  std::vector<IntPoint> out;
  ctx.model().for_each_x([&](const IntVector& x) {
    for (IntVector& y : reaction_set_k(ctx, x, k)) out.push_back({x, std::move(y)});
  });
  return out;
}

std::optional<std::int64_t> min_ifd_norm(const KoptContext& ctx, const IntPoint& point) {
  if (!ctx.model().in_S(point.x, point.y)) throw std::invalid_argument("min_ifd_norm: point is not in S");
  return ctx.levels(point.x).at(point.y);
}

std::vector<IntVector> minimal_directions(const KoptContext& ctx, const IntPoint& point) {
  std::optional<std::int64_t> level = min_ifd_norm(ctx, point);
  std::vector<IntVector> out;
  if (!level) return out;
  const std::int64_t own = ctx.model().follower_key(point.y);
  for (const auto& [y, ignored] : ctx.levels(point.x)) {
    if (ctx.model().follower_key(y) < own && l1_distance(y, point.y) == *level) {
      IntVector w(y.size());
      for (std::size_t j = 0; j < y.size(); ++j) w[j] = y[j] - point.y[j];
      out.push_back(std::move(w));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void export_slice_csv(const KoptContext& ctx, const IntVector& x, std::ostream& out) {
  const ExactModel& model = ctx.model();
  for (int j = 0; j < model.n2(); ++j) out << 'y' << (j + 1) << ',';
  out << "in_S,level\n";
  const auto& levels = ctx.levels(x);
  IntVector y(model.y_lo());
  const std::size_t n2 = y.size();
  auto emit = [&](const IntVector& point) {
    for (auto v : point) out << v << ',';
    bool member = model.in_S(x, point);
    out << (member ? 1 : 0) << ',';
    if (member) {
      const auto& level = levels.at(point);
      if (level) {
        out << *level;
      } else {
        out << "none";
      }
    }
    out << '\n';
  };
  for (std::size_t j = 0; j < n2; ++j) {
    if (model.y_lo()[j] > model.y_hi()[j]) return;
  }
  while (true) {
    emit(y);
    std::size_t j = n2;
    bool advanced = false;
    while (j > 0) {
      --j;
      if (y[j] < model.y_hi()[j]) {
        ++y[j];
        advanced = true;
        break;
      }
      y[j] = model.y_lo()[j];
    }
    if (!advanced) return;
  }
}

}  // namespace miblp
