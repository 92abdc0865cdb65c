// Copyright 2026 The gpriv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpriv/spgb.h"

#include <algorithm>

#include <gtest/gtest.h>

#include "gpriv/ld.h"
#include "gpriv/oracle.h"
#include "test_util.h"

namespace gpriv {
namespace {

using testing::FromRows;
using testing::MakePanel;
using testing::Unwrap;

SpgbConfig Config(double alpha, double w, ThreatModel model) {
  SpgbConfig c;
  c.alpha = alpha;
  c.w = w;
  c.model = model;
  return c;
}

TEST(SpgbTest, ZeroWeightDoesNothing) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 300, 30, 30, 1);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  for (const ThreatModel& m : {ThreatModel::Fixed(0), ThreatModel::Adaptive(10)}) {
    const DefenseSolution s = Unwrap(RunSpgb(p, c, Config(0.5, 0.0, m)));
    EXPECT_TRUE(s.flips.empty());
    EXPECT_TRUE(s.masks.empty());
    EXPECT_EQ(s.objective, 0.0);
    EXPECT_EQ(s.utility_pct, 100.0);
  }
}

TEST(SpgbTest, SingleCarrierPicksCheaperAction) {
  // One dataset individual carrying one yes SNV.
  const GenotypePanel p =
      FromRows(ReleaseMode::kBeacon, {{1}}, {{1}, {0}, {0}, {0}});
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  const double start = c.a[0];
  // Threshold reachable by either action: between the start and the
  // masked score 0.
  const ThreatModel m = ThreatModel::Fixed(start / 2);
  const DefenseSolution flip = Unwrap(RunSpgb(p, c, Config(0.2, 100, m)));
  EXPECT_EQ(flip.flips, std::vector<int>{0});
  EXPECT_TRUE(flip.masks.empty());
  // Gain per unit cost decides: the flip gains B - A, far more than the
  // mask's -A, so masks win only when flips are very expensive.
  const DefenseSolution still_flip = Unwrap(RunSpgb(p, c, Config(0.9, 100, m)));
  EXPECT_EQ(still_flip.flips, std::vector<int>{0});
  ASSERT_GT(-c.a[0] / 0.01, (c.b[0] - c.a[0]) / 0.99);
  const DefenseSolution mask = Unwrap(RunSpgb(p, c, Config(0.99, 100, m)));
  EXPECT_EQ(mask.masks, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(mask.privacy_pct, 100.0);
}

TEST(SpgbTest, ObjectiveIsMinimumOfTrace) {
  for (int seed = 0; seed < 10; ++seed) {
    const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 400, 40, 40, seed);
    const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
    for (const ThreatModel& m :
         {ThreatModel::Fixed(0.5), ThreatModel::Adaptive(10)}) {
      SpgbTrace trace;
      const DefenseSolution s =
          Unwrap(RunSpgb(p, c, Config(0.6, 0.3, m), &trace));
      ASSERT_FALSE(trace.objective.empty());
      EXPECT_DOUBLE_EQ(s.objective, *std::min_element(trace.objective.begin(),
                                                      trace.objective.end()));
      if (!m.adaptive()) {
        EXPECT_TRUE(std::is_sorted(trace.coverage.begin(), trace.coverage.end()));
      }
      // Metrics are recomputed from scratch, independently of the trace.
      DefenseSolution again = s;
      ASSERT_TRUE(EvaluateSolution(p, &c, m, again).ok());
      EXPECT_NEAR(again.objective, s.objective, 1e-9);
    }
  }
}

TEST(SpgbTest, RestrictionsAreHonored) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 300, 30, 30, 12);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  SpgbConfig cfg = Config(0.8, 5.0, ThreatModel::Fixed(0.5));
  cfg.restriction = ActionRestriction::kFlipOnly;
  EXPECT_TRUE(Unwrap(RunSpgb(p, c, cfg)).masks.empty());
  cfg.restriction = ActionRestriction::kMaskOnly;
  EXPECT_TRUE(Unwrap(RunSpgb(p, c, cfg)).flips.empty());
  EXPECT_EQ(Unwrap(ParseActionRestriction("mask")), ActionRestriction::kMaskOnly);
  EXPECT_FALSE(ParseActionRestriction("swap").ok());
}

TEST(SpgbTest, NeverBeatsTheOracle) {
  for (int seed = 0; seed < 15; ++seed) {
    const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 8, 4, 8, 50 + seed);
    const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
    const ThreatModel m = ThreatModel::Fixed(-1.0);
    const DefenseSolution g = Unwrap(RunSpgb(p, c, Config(0.5, 1.0, m)));
    const DefenseSolution o = Unwrap(SolveBeaconExact(p, c, 0.5, 1.0, m));
    EXPECT_GE(g.objective, o.objective - 1e-9);
  }
}

TEST(SpgbTest, FullCoverageRun) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 500, 30, 30, 21);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  SpgbConfig cfg = Config(0.5, 0.01, ThreatModel::Fixed(0.0));
  cfg.run_to_full_coverage = true;
  const DefenseSolution s = Unwrap(RunSpgb(p, c, cfg));
  EXPECT_EQ(s.method, "mig");
  EXPECT_TRUE(s.feasible);
  EXPECT_DOUBLE_EQ(s.privacy_pct, 100.0);
}

TEST(SpgLdTest, EmptyIndexMatchesSpgb) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 300, 30, 30, 4);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  const LdIndex empty = EmptyLdIndex(p.num_snvs());
  SpgbConfig cfg = Config(0.5, 1.0, ThreatModel::Fixed(0.5));
  const DefenseSolution plain = Unwrap(RunSpgb(p, c, cfg));
  cfg.ld_index = &empty;
  const DefenseSolution ld = Unwrap(RunSpgb(p, c, cfg));
  EXPECT_EQ(ld.method, "spgld");
  EXPECT_EQ(ld.flips, plain.flips);
  EXPECT_EQ(ld.masks, plain.masks);
  EXPECT_EQ(ld.objective, plain.objective);
}

TEST(SpgLdTest, ClosesNeighborhoods) {
  const GenotypePanel p =
      MakePanel(ReleaseMode::kBeacon, 1000, 60, 60, 8, 20, 0.9);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  const LdIndex index = Unwrap(BuildLdIndex(p, 250, 0.2));
  ThreatModel m = ThreatModel::Fixed(0.0);
  m.ld_aware = true;
  SpgbConfig cfg = Config(0.5, 1.0, m);
  cfg.ld_index = &index;
  const DefenseSolution s = Unwrap(RunSpgb(p, c, cfg));
  EXPECT_EQ(s.attack_label, "ld-worst-case");
  std::vector<int> acted = s.flips;
  acted.insert(acted.end(), s.masks.begin(), s.masks.end());
  std::sort(acted.begin(), acted.end());
  const ReleaseState state = Unwrap(ApplySolution(p, s));
  const LdInference inf = LdInfer(state, acted, index, 0.75);
  for (const int j : inf.recovered()) {
    // Anything recovered must have an un-actioned neighbor.
    const auto nb = index.of(j);
    EXPECT_FALSE(std::all_of(nb.begin(), nb.end(), [&](int k) {
      return std::binary_search(acted.begin(), acted.end(), k);
    }));
  }
}

}  // namespace
}  // namespace gpriv
