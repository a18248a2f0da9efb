#include "miblp/bruteforce.hpp"
#include "miblp/cuts.hpp"
#include "miblp/kopt.hpp"
#include "miblp/numeric.hpp"
#include "miblp/oracle.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace miblp;
using miblp::testing::data_path;
using miblp::testing::Gen;

namespace {

const MiblpInstance& moore_bard() {
  static const MiblpInstance inst = load_instance(data_path("moore_bard.miblp"));
  return inst;
}

const MiblpInstance& three_d() {
  static const MiblpInstance inst = load_instance(data_path("three_d.miblp"));
  return inst;
}

Eigen::VectorXd stacked(const IntPoint& p) { return to_eigen(p.to_point().stacked()); }

// Exact: y + w stays in L(x) and d2 w <= -1.
bool improving_feasible(const ExactModel& model, const MiblpInstance& inst, const IntPoint& p,
                        const std::vector<double>& w) {
  IntVector y = p.y;
  Rational gain = 0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (w[j] != std::round(w[j])) return false;
    y[j] += static_cast<std::int64_t>(w[j]);
    gain += inst.d2[j] * static_cast<long long>(w[j]);
  }
  if (gain > -1) return false;
  for (const IntVector& other : model.follower_set(p.x)) {
    if (other == y) return true;
  }
  return false;
}

}  // namespace

TEST(Oracle, MooreBardDirectionAtRelaxationOptimum) {
  const NumericInstance num(moore_bard());
  const OracleOutcome out = solve_direction_milp(num, Point{{2}, {4}}, std::nullopt, ObjectiveKind::Norm1);
  ASSERT_EQ(out.kind, OracleOutcome::Kind::Found);
  ASSERT_EQ(out.direction.w.size(), 1u);
  EXPECT_EQ(out.direction.w[0], -1.0);
  EXPECT_EQ(out.direction.norm1, 1.0);
  EXPECT_EQ(out.direction.improvement, -1.0);
}

TEST(Oracle, MooreBardFractionalPointHasNoDirection) {
  const NumericInstance num(moore_bard());
  const OracleOutcome out = solve_direction_milp(num, Point{{1}, {2.2}}, std::nullopt, ObjectiveKind::Norm1);
  EXPECT_EQ(out.kind, OracleOutcome::Kind::NoImprovingDirection);
}

TEST(Oracle, MooreBardCertificatesAndValueFunction) {
  const NumericInstance num(moore_bard());
  EXPECT_TRUE(certify_bilevel_feasible(num, Point{{2}, {2}}));
  EXPECT_FALSE(certify_bilevel_feasible(num, Point{{2}, {4}}));
  EXPECT_TRUE(legacy_feasibility_check(num, Point{{2}, {2}}));
  EXPECT_FALSE(legacy_feasibility_check(num, Point{{2}, {4}}));
  EXPECT_DOUBLE_EQ(evaluate_phi(num, {2}), 2.0);
  EXPECT_DOUBLE_EQ(evaluate_phi(num, {8}), 1.0);
  EXPECT_THROW(certify_bilevel_feasible(num, Point{{1}, {2.2}}), PointNotInS);
  EXPECT_THROW(legacy_feasibility_check(num, Point{{1}, {2.2}}), PointNotInS);
}

TEST(Oracle, ThreeDimensionalKIdThreshold) {
  const NumericInstance num(three_d());
  const Point p{{3}, {4, 1}};
  EXPECT_FALSE(k_id_feasible(num, p, 4));
  EXPECT_TRUE(k_id_feasible(num, p, 5));
  const OracleOutcome out = solve_direction_milp(num, p, 5, ObjectiveKind::Norm1);
  ASSERT_TRUE(out.found());
  EXPECT_EQ(out.direction.w, (std::vector<double>{4, -1}));
}

TEST(Oracle, LocalSearchNeedsRadiusTwoAtThreeDPoint) {
  const NumericInstance num(three_d());
  const Point p{{1}, {3, 2}};
  EXPECT_EQ(local_search_neighbors(num, 1, p, ObjectiveKind::Norm1).kind, OracleOutcome::Kind::HeuristicExhausted);
  const OracleOutcome out = local_search_neighbors(num, 2, p, ObjectiveKind::Norm1);
  ASSERT_TRUE(out.found());
  EXPECT_EQ(out.direction.w, (std::vector<double>{1, -1}));
}

TEST(Oracle, ConfigRejectsInconsistentSettings) {
  OracleConfig cfg;
  cfg.method = DirectionMethod::ExactMilpK;
  cfg.k = 0;
  EXPECT_THROW(cfg.check(), std::invalid_argument);
  cfg.k = 2;
  cfg.depth_lb = 5;
  cfg.depth_ub = 4;
  EXPECT_THROW(cfg.check(), std::invalid_argument);
}

TEST(Oracle, DepthWindowSelectsHeuristic) {
  const NumericInstance num(moore_bard());
  OracleConfig cfg;
  cfg.method = DirectionMethod::LocalSearch;
  cfg.k = 2;
  cfg.depth_lb = 10;
  OracleStats stats;
  const Point p{{2}, {4}};
  EXPECT_EQ(find_improving_direction(num, p, 3, cfg, &stats).method, DirectionMethod::ExactMilp);
  EXPECT_EQ(find_improving_direction(num, p, 12, cfg, &stats).method, DirectionMethod::LocalSearch);
  EXPECT_EQ(stats.ifd_calls, 2);
  EXPECT_EQ(stats.local_search_calls, 1);
}

// Property: on points of S the certificate, the value-function test and
// enumeration agree; every emitted direction is exactly improving and feasible.
TEST(OracleProperty, CertificatesMatchEnumeration) {
  Gen g(41);
  for (int t = 0; t < 40; ++t) {
    const MiblpInstance inst = miblp::testing::random_instance(g);
    const NumericInstance num(inst);
    const ExactModel model(inst);
    const auto F = enumerate_F(inst);
    const std::set<IntPoint> f_set(F.begin(), F.end());
    for (const IntPoint& p : enumerate_S(inst)) {
      const Point pt = p.to_point();
      const bool in_F = f_set.count(p) > 0;
      ASSERT_EQ(certify_bilevel_feasible(num, pt), in_F);
      ASSERT_EQ(legacy_feasibility_check(num, pt), in_F);
      for (ObjectiveKind obj : {ObjectiveKind::Norm1, ObjectiveKind::IdicFriendly, ObjectiveKind::Steepest}) {
        const OracleOutcome out = solve_direction_milp(num, pt, std::nullopt, obj);
        ASSERT_EQ(out.found(), !in_F);
        if (out.found()) {
          ASSERT_TRUE(improving_feasible(model, inst, p, out.direction.w));
        }
      }
    }
  }
}

// Property: (k-ID) feasibility is monotone in k and local search at radius k
// finds a direction exactly when (k-ID) is feasible.
TEST(OracleProperty, KNeighborhoodConsistency) {
  Gen g(42);
  for (int t = 0; t < 40; ++t) {
    const MiblpInstance inst = miblp::testing::random_instance(g);
    const NumericInstance num(inst);
    const ExactModel model(inst);
    for (const IntPoint& p : enumerate_S(inst)) {
      const Point pt = p.to_point();
      bool previous = false;
      for (int k = 1; k <= 3; ++k) {
        const bool kid = k_id_feasible(num, pt, k);
        ASSERT_TRUE(!previous || kid);
        previous = kid;
        const OracleOutcome ls = local_search_neighbors(num, k, pt, ObjectiveKind::Norm1);
        ASSERT_EQ(ls.found(), kid) << "k=" << k;
        if (ls.found()) {
          ASSERT_LE(ls.direction.norm1, k);
          ASSERT_TRUE(improving_feasible(model, inst, p, ls.direction.w));
        }
      }
    }
  }
}

// Property: the value function equals the enumerated follower optimum.
TEST(OracleProperty, PhiMatchesEnumeration) {
  Gen g(43);
  for (int t = 0; t < 40; ++t) {
    const MiblpInstance inst = miblp::testing::random_instance(g);
    const NumericInstance num(inst);
    const ExactModel model(inst);
    model.for_each_x([&](const IntVector& x) {
      const auto ref = phi_by_enumeration(inst, x);
      std::vector<double> xd(x.begin(), x.end());
      const double phi = evaluate_phi(num, xd);
      if (!ref) {
        EXPECT_TRUE(std::isinf(phi));
      } else {
        EXPECT_DOUBLE_EQ(phi, to_double(*ref));
      }
    });
  }
}

TEST(Cuts, MooreBardRootIdicSeparatesVertex) {
  const NumericInstance num(moore_bard());
  const LpProblem lp = relaxation_lp(num);
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  const SimplicialCone cone = extract_cone(lp, sol);
  const BilevelFreeSet set = bfs_from_direction(num, {-1});
  EXPECT_TRUE(set.strictly_contains(cone.vertex, kInteriorMargin));
  const CutResult cr = intersection_cut(cone, set, num.n1);
  ASSERT_EQ(cr.status, CutResult::Status::Generated);
  EXPECT_GE(cut_violation(cr.cut, cone.vertex), kInteriorMargin);
  double largest = 0.0;
  for (double a : cr.cut.alpha_x) largest = std::max(largest, std::abs(a));
  for (double a : cr.cut.alpha_y) largest = std::max(largest, std::abs(a));
  EXPECT_NEAR(largest, 1.0, 1e-12);
  for (const IntPoint& p : enumerate_F(moore_bard())) EXPECT_LE(cut_violation(cr.cut, stacked(p)), 1e-9);
}

TEST(Cuts, FreeSetNotContainingVertexIsNotSeparable) {
  const NumericInstance num(moore_bard());
  const LpProblem lp = relaxation_lp(num);
  const LpSolution sol = solve_lp(lp);
  const SimplicialCone cone = extract_cone(lp, sol);
  // the set from w = +1 does not hold (2,4) in its interior
  const BilevelFreeSet set = bfs_from_direction(num, {1});
  EXPECT_EQ(intersection_cut(cone, set, num.n1).status, CutResult::Status::NotSeparable);
}

// Property: free sets built from improving directions and from improving
// follower solutions contain no bilevel feasible point in their interior.
TEST(CutsProperty, FreeSetsExcludeBilevelFeasiblePoints) {
  Gen g(44);
  for (int t = 0; t < 40; ++t) {
    const MiblpInstance inst = miblp::testing::random_instance(g);
    const NumericInstance num(inst);
    const auto F = enumerate_F(inst);
    for (const IntPoint& p : enumerate_S(inst)) {
      const Point pt = p.to_point();
      const OracleOutcome out = solve_direction_milp(num, pt, std::nullopt, ObjectiveKind::Norm1);
      if (!out.found()) continue;
      const BilevelFreeSet idic = bfs_from_direction(num, out.direction.w);
      ASSERT_TRUE(idic.strictly_contains(stacked(p), 0.0));
      const FollowerSolution best = solve_follower(num, pt.x);
      ASSERT_TRUE(best.feasible);
      const BilevelFreeSet isic = bfs_from_solution(num, best.y);
      ASSERT_TRUE(isic.strictly_contains(stacked(p), 0.0));
      for (const IntPoint& f : F) {
        ASSERT_FALSE(idic.strictly_contains(stacked(f), 1e-9));
        ASSERT_FALSE(isic.strictly_contains(stacked(f), 1e-9));
      }
    }
  }
}

// Property: root intersection cuts cut off the vertex and keep all of F.
TEST(CutsProperty, RootCutsAreValidAndSeparating) {
  Gen g(45);
  int generated = 0;
  for (int t = 0; t < 80; ++t) {
    const MiblpInstance inst = miblp::testing::random_instance(g);
    const NumericInstance num(inst);
    const LpProblem lp = relaxation_lp(num);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) continue;
    SimplicialCone cone;
    try {
      cone = extract_cone(lp, sol);
    } catch (const DegenerateCone&) {
      continue;
    }
    Point vertex{std::vector<double>(sol.x.data(), sol.x.data() + num.n1),
                 std::vector<double>(sol.x.data() + num.n1, sol.x.data() + num.num_vars())};
    const OracleOutcome out = solve_direction_milp(num, vertex, std::nullopt, ObjectiveKind::IdicFriendly);
    if (!out.found()) continue;
    const CutResult cr = intersection_cut(cone, bfs_from_direction(num, out.direction.w), num.n1);
    if (cr.status != CutResult::Status::Generated) continue;
    ++generated;
    EXPECT_GE(cut_violation(cr.cut, sol.x), kInteriorMargin);
    for (const IntPoint& p : enumerate_F(inst)) EXPECT_LE(cut_violation(cr.cut, stacked(p)), 1e-9);
  }
  EXPECT_GT(generated, 5);
}
