#include "miblp/verify.hpp"

#include <chrono>
#include <cmath>
#include <set>

namespace miblp {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::set<IntPoint> as_set(const std::vector<IntPoint>& points) { return {points.begin(), points.end()}; }

// Exact check that w is an improving feasible direction at the integer point.
bool direction_is_sound(const MiblpInstance& inst, const IntPoint& p, const std::vector<double>& w) {
  RationalVector wr;
  for (int j = 0; j < inst.n2; ++j) {
    if (j < inst.r2 && w[j] != std::round(w[j])) return false;
    wr.emplace_back(static_cast<long long>(std::llround(w[j])));
  }
  Rational improvement = 0;
  for (int j = 0; j < inst.n2; ++j) improvement += inst.d2[j] * wr[j];
  if (improvement > -1) return false;
  for (int i = 0; i < inst.m2(); ++i) {
    Rational lhs = 0;
    for (int j = 0; j < inst.n1; ++j) lhs += inst.A2[i][j] * p.x[j];
    for (int j = 0; j < inst.n2; ++j) lhs += inst.G2[i][j] * (p.y[j] + wr[j]);
    if (lhs < inst.b2[i]) return false;
  }
  for (int j = 0; j < inst.n2; ++j) {
    Rational v = p.y[j] + wr[j];
    if (v < inst.lower[inst.n1 + j] || v > *inst.upper[inst.n1 + j]) return false;
  }
  return true;
}

bool in_box(const IntPoint& p, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  const std::size_t n1 = p.x.size();
  for (std::size_t j = 0; j < n1; ++j) {
    if (p.x[j] < lower[j] - 1e-9 || p.x[j] > upper[j] + 1e-9) return false;
  }
  for (std::size_t j = 0; j < p.y.size(); ++j) {
    if (p.y[j] < lower[n1 + j] - 1e-9 || p.y[j] > upper[n1 + j] + 1e-9) return false;
  }
  return true;
}

Eigen::VectorXd stacked(const IntPoint& p) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(p.x.size() + p.y.size()));
  Eigen::Index i = 0;
  for (auto v : p.x) z[i++] = static_cast<double>(v);
  for (auto v : p.y) z[i++] = static_cast<double>(v);
  return z;
}

}  // namespace

long VerifyReport::total_mismatches() const {
  return certify_mismatches + legacy_mismatches + k_id_mismatches + fk_mismatches + local_search_mismatches +
         unsound_directions + hierarchy_violations + solver_mismatches + cut_validity_violations +
         cut_separation_failures + k_idic_interior_violations + k_idic_cut_violations;
}

std::vector<VerifyConfig> verification_configs() {
  std::vector<VerifyConfig> out;
  SolverConfig base;
  base.record_cuts = true;

  VerifyConfig milp{"id-milp-idic", base};
  out.push_back(milp);

  VerifyConfig milp_k{"id-milpk2-both-linking", base};
  milp_k.config.oracle.method = DirectionMethod::ExactMilpK;
  milp_k.config.oracle.k = 2;
  milp_k.config.use_isic = true;
  milp_k.config.branching = BranchStrategy::LinkingPriority;
  out.push_back(milp_k);

  VerifyConfig ls_shallow{"id-ls2-0-10-both", base};
  ls_shallow.config.oracle.method = DirectionMethod::LocalSearch;
  ls_shallow.config.oracle.k = 2;
  ls_shallow.config.oracle.depth_ub = 10;
  ls_shallow.config.use_isic = true;
  out.push_back(ls_shallow);

  VerifyConfig ls_deep{"id-ls2-10-inf-idicobj", base};
  ls_deep.config.oracle.method = DirectionMethod::LocalSearch;
  ls_deep.config.oracle.k = 2;
  ls_deep.config.oracle.depth_lb = 10;
  ls_deep.config.oracle.objective = ObjectiveKind::IdicFriendly;
  out.push_back(ls_deep);

  VerifyConfig legacy{"legacy-both", base};
  legacy.config.oracle_mode = OracleMode::Legacy;
  legacy.config.use_isic = true;
  out.push_back(legacy);

  VerifyConfig isic{"id-milp-steepest-isic", base};
  isic.config.oracle.objective = ObjectiveKind::Steepest;
  isic.config.use_idic = false;
  isic.config.use_isic = true;
  out.push_back(isic);
  return out;
}

VerifyReport verify_instance(const MiblpInstance& original, const VerifyOptions& options) {
  VerifyReport rep;
  const MiblpInstance inst = original.has_finite_bounds() ? original : finalize_bounds(original);
  const NumericInstance num(inst);
  const KoptContext ctx(inst);
  rep.k_bar = ctx.k_bar();

  const std::vector<IntPoint> S = enumerate_S(inst);
  const std::set<IntPoint> F = as_set(enumerate_F(inst));
  rep.points_in_S = static_cast<long>(S.size());
  rep.points_in_F = static_cast<long>(F.size());

  std::set<int> radii(options.radii.begin(), options.radii.end());
  if (rep.k_bar >= 1) radii.insert(rep.k_bar);
  std::map<int, std::set<IntPoint>> Fk;
  for (int k : radii) Fk[k] = as_set(enumerate_Fk(ctx, k));

  if (options.oracle_equivalence) {
    auto t0 = std::chrono::steady_clock::now();
    for (const IntPoint& ip : S) {
      const Point p = ip.to_point();
      const bool in_F = F.count(ip) > 0;
      if (certify_bilevel_feasible(num, p) != in_F) ++rep.certify_mismatches;
      if (legacy_feasibility_check(num, p) != in_F) ++rep.legacy_mismatches;
      const std::optional<std::int64_t> level = min_ifd_norm(ctx, ip);
      if (level.has_value() == in_F) ++rep.fk_mismatches;
      for (int k : radii) {
        const bool by_level = level && *level <= k;
        if (k_id_feasible(num, p, k) != by_level) ++rep.k_id_mismatches;
        if (by_level != (Fk[k].count(ip) == 0)) ++rep.fk_mismatches;
      }
    }
    rep.seconds_oracle_equivalence = seconds_since(t0);
    if (rep.certify_mismatches + rep.legacy_mismatches + rep.k_id_mismatches + rep.fk_mismatches > 0) {
      rep.messages.emplace_back("oracle equivalence mismatches");
    }
  }

  auto t1 = std::chrono::steady_clock::now();
  if (options.local_search) {
    for (const IntPoint& ip : S) {
      const Point p = ip.to_point();
      OracleOutcome ls = local_search_neighbors(num, rep.k_bar, p, ObjectiveKind::Norm1);
      OracleOutcome exact = solve_direction_milp(num, p, std::nullopt, ObjectiveKind::Steepest, {},
                                                 MilpMode::FirstFeasible);
      if (ls.found() != exact.found()) ++rep.local_search_mismatches;
      if (ls.found() && !direction_is_sound(inst, ip, ls.direction.w)) ++rep.unsound_directions;
    }
    if (rep.local_search_mismatches + rep.unsound_directions > 0) {
      rep.messages.emplace_back("local search disagrees with (ID)");
    }
  }

  if (options.hierarchy) {
    std::set<IntPoint> previous = as_set(enumerate_Fk(ctx, 0));
    if (previous != as_set(S)) ++rep.hierarchy_violations;
    for (int k = 1; k <= rep.k_bar; ++k) {
      std::set<IntPoint> current = as_set(enumerate_Fk(ctx, k));
      for (const IntPoint& p : current) {
        if (!previous.count(p)) ++rep.hierarchy_violations;
      }
      previous = std::move(current);
    }
    if (previous != F) ++rep.hierarchy_violations;
    if (rep.hierarchy_violations > 0) rep.messages.emplace_back("k-opt hierarchy broken");
  }

  if (options.solver_and_cuts) {
    const EnumeratedOptimum best = optimal_by_enumeration(inst);
    std::map<int, std::vector<IntPoint>> fk_small;
    for (int k : {1, 2, 3}) fk_small[k] = enumerate_Fk(ctx, k);

    for (const VerifyConfig& vc : verification_configs()) {
      SolveResult r = solve(inst, vc.config);
      bool agree = best.feasible
                       ? r.status == SolveStatus::Optimal && std::abs(r.value - to_double(best.value)) <= 1e-6
                       : r.status == SolveStatus::Infeasible;
      if (!agree) {
        ++rep.solver_mismatches;
        rep.messages.push_back("solver disagrees with enumeration under " + vc.name);
      }
      for (const RecordedCut& rc : r.cuts) {
        ++rep.cuts_checked;
        if (cut_violation(rc.cut, to_eigen(rc.cut.vertex)) < kInteriorMargin) ++rep.cut_separation_failures;
        for (const IntPoint& p : F) {
          if (rc.cut.local && !in_box(p, rc.lower, rc.upper)) continue;
          if (cut_violation(rc.cut, stacked(p)) > 1e-9) ++rep.cut_validity_violations;
        }
        if (rc.cut.family != CutFamily::Idic) continue;
        double norm = 0.0;
        for (double v : rc.cut.generator) norm += std::abs(v);
        const BilevelFreeSet set = bfs_from_direction(num, rc.cut.generator);
        for (int k : {1, 2, 3}) {
          if (norm > k + 1e-9) continue;
          for (const IntPoint& p : fk_small[k]) {
            if (set.strictly_contains(stacked(p), 1e-9)) ++rep.k_idic_interior_violations;
          }
        }
      }
    }

    // k-IDICs from the root cone are valid for F(k)
    BranchAndCut root_solver(inst, SolverConfig{});
    LpProblem lp = relaxation_lp(num);
    const Node root = root_solver.root();
    lp.lower = root.lower;
    lp.upper = root.upper;
    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::Optimal) {
      try {
        SimplicialCone cone = extract_cone(lp, sol);
        Point vertex;
        vertex.x.assign(sol.x.data(), sol.x.data() + num.n1);
        vertex.y.assign(sol.x.data() + num.n1, sol.x.data() + num.num_vars());
        for (int k : {1, 2, 3}) {
          OracleOutcome out = solve_direction_milp(num, vertex, k, ObjectiveKind::Norm1);
          if (!out.found()) continue;
          CutResult cr = intersection_cut(cone, bfs_from_direction(num, out.direction.w), num.n1);
          if (cr.status == CutResult::Status::Generated) {
            ++rep.cuts_checked;
            for (const IntPoint& p : fk_small[k]) {
              if (cut_violation(cr.cut, stacked(p)) > 1e-9) ++rep.k_idic_cut_violations;
            }
          } else if (cr.status == CutResult::Status::ConeInsideFreeSet) {
            // the cone holds P, so F(k) must be empty
            rep.k_idic_cut_violations += static_cast<long>(fk_small[k].size());
          }
        }
      } catch (const DegenerateCone&) {
        rep.messages.emplace_back("root cone degenerate; root k-IDIC check skipped");
      }
    }
    if (rep.cut_validity_violations + rep.cut_separation_failures + rep.k_idic_interior_violations +
            rep.k_idic_cut_violations >
        0) {
      rep.messages.emplace_back("cut checks failed");
    }
  }
  rep.seconds_other = seconds_since(t1);
  return rep;
}

}  // namespace miblp
