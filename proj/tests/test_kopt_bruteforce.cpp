#include "miblp/bruteforce.hpp"
#include "miblp/kopt.hpp"
#include "miblp/numeric.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace miblp;
using miblp::testing::data_path;
using miblp::testing::Gen;

namespace {

std::set<IntVector> without(const std::vector<IntVector>& a, const std::vector<IntVector>& b) {
  std::set<IntVector> out(a.begin(), a.end());
  for (const auto& v : b) out.erase(v);
  return out;
}

}  // namespace

TEST(Bruteforce, MooreBardOptimumAndSets) {
  const MiblpInstance inst = load_instance(data_path("moore_bard.miblp"));
  const EnumeratedOptimum best = optimal_by_enumeration(inst);
  ASSERT_TRUE(best.feasible);
  EXPECT_EQ(best.point.x, IntVector{2});
  EXPECT_EQ(best.point.y, IntVector{2});
  EXPECT_EQ(best.value, Rational(-22));
  // (8,1) is in S: the leader box ends at 8
  const auto S = enumerate_S(inst);
  EXPECT_NE(std::find(S.begin(), S.end(), IntPoint{{8}, {1}}), S.end());
  EXPECT_EQ(phi_by_enumeration(inst, {2}), Rational(2));
  EXPECT_EQ(phi_by_enumeration(inst, {8}), Rational(1));
}

TEST(Bruteforce, RejectsMixedAndOversizedInstances) {
  MiblpInstance inst = load_instance(data_path("moore_bard.miblp"));
  inst.r2 = 0;
  EXPECT_THROW(ExactModel{inst}, NotPureInteger);
  inst = load_instance(data_path("moore_bard.miblp"));
  EXPECT_THROW(enumerate_S(inst, 10), EnumerationTooLarge);
}

TEST(Bruteforce, FractionalDataIsScaledExactly) {
  MiblpInstance inst = load_instance(data_path("moore_bard.miblp"));
  // 2x + 10y >= 15 scaled by 1/10 stays the same region
  inst.A2[3][0] = Rational(1, 5);
  inst.G2[3][0] = Rational(1);
  inst.b2[3] = Rational(3, 2);
  const ExactModel model(inst);
  EXPECT_TRUE(model.follower_rows_hold({5}, {1}));
  EXPECT_FALSE(model.follower_rows_hold({2}, {1}));
}

// Property: exact membership agrees with the floating-point check on every grid point.
TEST(BruteforceProperty, ExactMembershipMatchesNumeric) {
  Gen g(51);
  for (int t = 0; t < 60; ++t) {
    const MiblpInstance inst = miblp::testing::random_instance(g);
    const NumericInstance num(inst);
    const ExactModel model(inst);
    const auto S = enumerate_S(inst);
    const std::set<IntPoint> s_set(S.begin(), S.end());
    long grid = 0;
    model.for_each_x([&](const IntVector& x) {
      std::vector<IntVector> ys{{}};
      for (int j = 0; j < inst.n2; ++j) {
        std::vector<IntVector> next;
        for (const auto& y : ys) {
          for (auto v = model.y_lo()[j]; v <= model.y_hi()[j]; ++v) {
            next.push_back(y);
            next.back().push_back(v);
          }
        }
        ys = std::move(next);
      }
      for (const auto& y : ys) {
        ++grid;
        const IntPoint p{x, y};
        ASSERT_EQ(s_set.count(p) > 0, in_S(num, p.to_point()));
      }
    });
    EXPECT_GE(grid, static_cast<long>(S.size()));
  }
}

TEST(Kopt, KBarOfExamples) {
  EXPECT_EQ(compute_k_bar(load_instance(data_path("moore_bard.miblp"))), 4);
  EXPECT_EQ(compute_k_bar(load_instance(data_path("three_d.miblp"))), 13);
}

TEST(Kopt, ThreeDReactionSetsShrinkWithRadius) {
  const KoptContext ctx(load_instance(data_path("three_d.miblp")));
  const auto r = reaction_set_k(ctx, {1}, ctx.k_bar());
  EXPECT_EQ(without(reaction_set_k(ctx, {1}, 1), r), (std::set<IntVector>{{1, 2}, {2, 2}, {3, 2}, {7, 3}}));
  EXPECT_EQ(without(reaction_set_k(ctx, {1}, 2), r), (std::set<IntVector>{{1, 2}, {2, 2}}));
  EXPECT_EQ(without(reaction_set_k(ctx, {1}, 3), r), (std::set<IntVector>{{1, 2}}));
}

TEST(Kopt, ThreeDMinimalDirection) {
  const KoptContext ctx(load_instance(data_path("three_d.miblp")));
  const IntPoint p{{3}, {4, 1}};
  EXPECT_EQ(min_ifd_norm(ctx, p), 5);
  EXPECT_EQ(minimal_directions(ctx, p), (std::vector<IntVector>{{4, -1}}));
  EXPECT_THROW(min_ifd_norm(ctx, IntPoint{{3}, {0, 0}}), std::invalid_argument);
}

TEST(Kopt, SliceCsvLayout) {
  const KoptContext ctx(load_instance(data_path("three_d.miblp")));
  std::ostringstream out;
  export_slice_csv(ctx, {1}, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "y1,y2,in_S,level");
  int rows = 0;
  int none = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.size() >= 4 && line.substr(line.size() - 4) == "none") ++none;
  }
  EXPECT_EQ(rows, 11 * 5);
  EXPECT_EQ(none, static_cast<int>(reaction_set_k(ctx, {1}, ctx.k_bar()).size()));
}

// Property: the hierarchy S = F(0) >= F(1) >= ... >= F(k_bar) = F, and a
// point leaves F(k) exactly at radius min_ifd_norm.
TEST(KoptProperty, HierarchyIsNested) {
  Gen g(52);
  for (int t = 0; t < 60; ++t) {
    const MiblpInstance inst = miblp::testing::random_instance(g);
    const KoptContext ctx(inst);
    const auto S = enumerate_S(inst);
    const auto F = enumerate_F(inst);
    ASSERT_EQ(enumerate_Fk(ctx, 0), S);
    std::vector<IntPoint> prev = S;
    for (int k = 1; k <= ctx.k_bar(); ++k) {
      const auto cur = enumerate_Fk(ctx, k);
      ASSERT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
      for (const IntPoint& p : S) {
        const auto level = min_ifd_norm(ctx, p);
        const bool in_cur = std::binary_search(cur.begin(), cur.end(), p);
        ASSERT_EQ(in_cur, !level || *level > k);
      }
      prev = cur;
    }
    ASSERT_EQ(prev, F);
  }
}
