#include "miblp/verify.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace miblp;
using miblp::testing::data_path;

TEST(Verify, ExamplesPassEveryCheck) {
  for (const char* name : {"moore_bard.miblp", "three_d.miblp"}) {
    const VerifyReport r = verify_instance(load_instance(data_path(name)));
    EXPECT_EQ(r.total_mismatches(), 0) << name;
    EXPECT_GT(r.cuts_checked, 0) << name;
    EXPECT_GT(r.points_in_F, 0) << name;
  }
}

TEST(Verify, ThreeDCounts) {
  const VerifyReport r = verify_instance(load_instance(data_path("three_d.miblp")));
  EXPECT_EQ(r.points_in_S, 94);
  EXPECT_EQ(r.points_in_F, 11);
  EXPECT_EQ(r.k_bar, 13);
}

TEST(Verify, OptionsSkipSections) {
  VerifyOptions opts;
  opts.solver_and_cuts = false;
  opts.local_search = false;
  const VerifyReport r = verify_instance(load_instance(data_path("moore_bard.miblp")), opts);
  EXPECT_EQ(r.cuts_checked, 0);
  EXPECT_EQ(r.total_mismatches(), 0);
}

TEST(Verify, ConfigurationsCoverBothOraclesAndCutFamilies) {
  bool legacy = false, isic = false, ls = false;
  for (const auto& vc : verification_configs()) {
    legacy = legacy || vc.config.oracle_mode == OracleMode::Legacy;
    isic = isic || vc.config.use_isic;
    ls = ls || vc.config.oracle.method == DirectionMethod::LocalSearch;
    EXPECT_TRUE(vc.config.record_cuts);
  }
  EXPECT_TRUE(legacy && isic && ls);
}

// Property: the first suite members pass every cross-check.
TEST(VerifyProperty, SuitePrefixIsClean) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const VerifyReport r = verify_instance(suite_instance(seed));
    ASSERT_EQ(r.total_mismatches(), 0) << "seed " << seed;
  }
}
