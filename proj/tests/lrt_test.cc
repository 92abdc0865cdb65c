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

#include "gpriv/lrt.h"

#include <cmath>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "gpriv/rng.h"
#include "test_util.h"

namespace gpriv {
namespace {

using boost::multiprecision::cpp_bin_float_50;
using testing::FromRows;
using testing::MakePanel;
using testing::Unwrap;

// A_j and B_j at 50 significant digits.
struct Exact {
  double a;
  double b;
};
Exact ExactConstants(double ref, int n, double gamma) {
  const cpp_bin_float_50 keep = 1 - cpp_bin_float_50(ref);
  const cpp_bin_float_50 rn = pow(keep, 2 * n);
  const cpp_bin_float_50 rn1 = pow(keep, 2 * (n - 1));
  const cpp_bin_float_50 g = gamma;
  return {static_cast<double>(log((1 - rn) / (1 - g * rn1))),
          static_cast<double>(log(rn / (g * rn1)))};
}

TEST(BeaconConstantsTest, MatchHighPrecision) {
  for (const int n : {1, 2, 10, 100, 400}) {
    for (const double gamma : {1e-6, 1e-3, 0.2}) {
      const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 200, n, 60, n);
      const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p, gamma));
      for (int j = 0; j < p.num_snvs(); ++j) {
        const double ref = p.aaf(Population::kReference, j);
        const Exact e = ExactConstants(ref, n, gamma);
        EXPECT_NEAR(c.b[j], e.b, 1e-12 * std::max(1.0, std::fabs(e.b)));
        if (ref > 0.0) {
          EXPECT_NEAR(c.a[j], e.a, 1e-11 * std::max(1.0, std::fabs(e.a)))
              << "n=" << n << " gamma=" << gamma << " ref=" << ref;
        } else {
          EXPECT_TRUE(c.degenerate[j]);
        }
      }
    }
  }
}

TEST(BeaconConstantsTest, RejectsBadGamma) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 10, 5, 5, 1);
  EXPECT_FALSE(PrecomputeBeaconConstants(p, 0.0).ok());
  EXPECT_FALSE(PrecomputeBeaconConstants(p, 0.25).ok());
  const GenotypePanel q = MakePanel(ReleaseMode::kAaf, 10, 5, 5, 1);
  EXPECT_FALSE(PrecomputeBeaconConstants(q).ok());
}

TEST(BeaconScoresTest, HandExample) {
  // SNV 0: yes (carried in D), SNV 1: no. Reference frequencies 1/4, 1/4.
  const GenotypePanel p =
      FromRows(ReleaseMode::kBeacon, {{1, 0}, {0, 0}},
               {{1, 0}, {0, 1}, {0, 0}, {0, 0}});
  const double gamma = 0.01;
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p, gamma));
  const double rn = std::pow(0.75, 4), rn1 = std::pow(0.75, 2);
  const double a0 = std::log((1 - rn) / (1 - gamma * rn1));
  const double b1 = std::log(rn / (gamma * rn1));
  const ReleaseState s = ReleaseState::Initial(p);
  const auto d = Unwrap(BeaconScores(p, c, s, Population::kDataset));
  EXPECT_NEAR(d[0], a0, 1e-14);
  EXPECT_EQ(d[1], 0.0);
  const auto r = Unwrap(BeaconScores(p, c, s, Population::kReference));
  EXPECT_NEAR(r[0], a0, 1e-14);
  EXPECT_NEAR(r[1], b1, 1e-14);

  ReleaseState flipped = s;
  flipped.flipped[0] = 1;
  EXPECT_NEAR(Unwrap(BeaconScores(p, c, flipped, Population::kDataset))[0],
              b1, 1e-14);
  ReleaseState masked = s;
  masked.masked[0] = 1;
  EXPECT_EQ(Unwrap(BeaconScores(p, c, masked, Population::kDataset))[0], 0.0);
}

TEST(BeaconScoresTest, MatchNaiveOnRandomStates) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GenotypePanel p =
        MakePanel(ReleaseMode::kBeacon, 150, 30, 40, 100 + trial);
    const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
    ReleaseState s = ReleaseState::Initial(p);
    const auto cand = BeaconCandidates(p, c);
    for (int j = 0; j < p.num_snvs(); ++j) {
      if (rng.Bernoulli(0.2)) {
        s.masked[j] = 1;
      } else if (cand[j] && rng.Bernoulli(0.2)) {
        s.flipped[j] = 1;
      }
    }
    for (const Population who : {Population::kDataset, Population::kReference}) {
      const auto got = Unwrap(BeaconScores(p, c, s, who));
      const auto want = testing::NaiveBeaconScores(p, c.gamma, s, who);
      for (size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got[i], static_cast<double>(want[i]),
                    1e-9 * std::max(1.0L, std::fabs(want[i])));
      }
    }
  }
}

TEST(AafScoresTest, MatchNaive) {
  Rng rng(5);
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 120, 25, 30, 77);
  ReleaseState s = ReleaseState::Initial(p);
  for (int j = 0; j < p.num_snvs(); ++j) {
    if (rng.Bernoulli(0.2)) {
      s.masked[j] = 1;
    } else {
      const double target =
          std::clamp(s.x[j] + rng.Laplace(0.05), kMinAaf, kMaxAaf);
      s.delta[j] = target - s.x[j];
    }
  }
  for (const Population who : {Population::kDataset, Population::kReference}) {
    const auto got = Unwrap(AafScores(p, s, who));
    const auto want = testing::NaiveAafScores(p, s, who);
    for (size_t i = 0; i < got.size(); ++i) {
      EXPECT_NEAR(got[i], static_cast<double>(want[i]),
                  1e-9 * std::max(1.0L, std::fabs(want[i])));
    }
  }
}

TEST(ReleaseStateTest, Validation) {
  const GenotypePanel p = FromRows(ReleaseMode::kBeacon, {{1, 0}}, {{0, 0}, {1, 0}, {0, 0}});
  ReleaseState s = ReleaseState::Initial(p);
  EXPECT_TRUE(ValidateState(p, s).ok());
  s.flipped[1] = 1;  // a "no" cannot be flipped
  EXPECT_FALSE(ValidateState(p, s).ok());
  s.flipped[1] = 0;
  s.flipped[0] = 1;
  s.masked[0] = 1;  // masked and flipped at once
  EXPECT_FALSE(ValidateState(p, s).ok());

  const GenotypePanel q = MakePanel(ReleaseMode::kAaf, 5, 4, 4, 2);
  ReleaseState t = ReleaseState::Initial(q);
  t.delta[0] = 2.0;
  EXPECT_FALSE(ValidateState(q, t).ok());
}

TEST(ReleaseStateTest, Counters) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 6, 4, 4, 2);
  ReleaseState s = ReleaseState::Initial(p);
  s.masked[1] = 1;
  s.masked[4] = 1;
  s.delta[0] = -s.x[0] + kMinAaf;
  s.delta[1] = 0.0;
  EXPECT_EQ(s.num_masked(), 2);
  EXPECT_EQ(s.MaskSet(), (std::vector<int>{1, 4}));
  EXPECT_DOUBLE_EQ(s.NoiseL1(), std::fabs(s.delta[0]));
}

TEST(MarginalTest, BeaconClosedForms) {
  const GenotypePanel p = MakePanel(ReleaseMode::kBeacon, 80, 20, 40, 9);
  const BeaconConstants c = Unwrap(PrecomputeBeaconConstants(p));
  const ReleaseState s = ReleaseState::Initial(p);
  const MarginalTable f =
      Unwrap(MarginalContributions(p, &c, s, MarginalKind::kFlip));
  const MarginalTable m =
      Unwrap(MarginalContributions(p, &c, s, MarginalKind::kMask));
  const auto cand = BeaconCandidates(p, c);
  for (int j = 0; j < p.num_snvs(); ++j) {
    EXPECT_EQ(f.non_carrier[j], 0.0);
    EXPECT_EQ(m.non_carrier[j], 0.0);
    if (cand[j]) {
      EXPECT_DOUBLE_EQ(f.carrier[j], c.b[j] - c.a[j]);
      EXPECT_DOUBLE_EQ(m.carrier[j], -c.a[j]);
    } else if (!p.beacon_response(j)) {
      EXPECT_EQ(f.carrier[j], 0.0);
      EXPECT_DOUBLE_EQ(m.carrier[j], -c.b[j]);
    }
  }
}

TEST(MarginalTest, AafFlipsRejected) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 10, 5, 5, 1);
  EXPECT_FALSE(MarginalContributions(p, nullptr, ReleaseState::Initial(p),
                                     MarginalKind::kFlip)
                   .ok());
}

TEST(MarginalTest, AverageIsPopulationMean) {
  const GenotypePanel p = MakePanel(ReleaseMode::kAaf, 30, 12, 8, 4);
  const MarginalTable t = Unwrap(MarginalContributions(
      p, nullptr, ReleaseState::Initial(p), MarginalKind::kMask));
  const auto avg = t.Average(p, Population::kReference);
  for (int j = 0; j < p.num_snvs(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < p.num_reference(); ++i) {
      sum += t.at(p.carries(Population::kReference, i, j), j);
    }
    EXPECT_NEAR(avg[j], sum / p.num_reference(), 1e-12);
  }
}

}  // namespace
}  // namespace gpriv
