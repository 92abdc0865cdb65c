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

// Attackers and the coverage set Z. An individual i in D is protected when
// L_i - threshold >= 0. The threshold is either a constant (fixed attacker)
// or the mean post-defense score of the lowest-K-percentile reference
// individuals (adaptive attacker).

#ifndef GPRIV_THREAT_H_
#define GPRIV_THREAT_H_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gpriv/dataset.h"
#include "gpriv/ld.h"
#include "gpriv/lrt.h"

namespace gpriv {

struct LdAttackParams {
  double threshold = kDefaultLdThreshold;
  int window = kDefaultLdWindow;
  double quorum = 0.75;
};

struct ThreatModel {
  enum class Kind { kFixed, kAdaptive };

  Kind kind = Kind::kFixed;
  double theta = 0.0;         // fixed threshold
  double k_percentile = 10;   // adaptive, in (0, 100]
  bool ld_aware = false;
  LdAttackParams ld;

  static ThreatModel Fixed(double theta) {
    ThreatModel t;
    t.kind = Kind::kFixed;
    t.theta = theta;
    return t;
  }
  static ThreatModel Adaptive(double k) {
    ThreatModel t;
    t.kind = Kind::kAdaptive;
    t.k_percentile = k;
    return t;
  }
  bool adaptive() const { return kind == Kind::kAdaptive; }
  // "fixed" or "adaptive".
  std::string KindName() const;
  // theta or K.
  double parameter() const { return adaptive() ? k_percentile : theta; }
};

absl::Status ValidateThreatModel(const ThreatModel& model);

// |D̄^(K)| = max(1, ceil(K/100 * n_ref)).
int LowestPercentileSize(double k_percentile, int num_reference);

// D̄^(K): indices of the lowest-scoring reference individuals, ordered by
// score and then by index.
std::vector<int> LowestPercentileMembers(std::span<const double> ref_scores,
                                         double k_percentile);

absl::StatusOr<double> AdaptiveThreshold(std::span<const double> ref_scores,
                                         double k_percentile);

// theta for a fixed model, AdaptiveThreshold for an adaptive one.
absl::StatusOr<double> AttackThreshold(const ThreatModel& model,
                                       std::span<const double> ref_scores);

struct CoverageReport {
  std::vector<int> covered;     // Z, ascending
  double threshold = 0.0;
  std::vector<double> margins;  // L_i - threshold for every i in D

  int size() const { return static_cast<int>(covered.size()); }
  double privacy_pct() const {
    return margins.empty() ? 0.0 : 100.0 * size() / margins.size();
  }
};

CoverageReport CoverageAt(double threshold,
                          std::span<const double> dataset_scores);

absl::StatusOr<CoverageReport> Coverage(const ThreatModel& model,
                                        std::span<const double> dataset_scores,
                                        std::span<const double> ref_scores);

// Correlation inference over the SNVs the attacker suspects were modified.
// For each suspect j with non-empty N_LD(j), j is inferred to be a yes when
// at least `quorum` of N_LD(j) are released (unmasked) yes responses.
struct LdInference {
  // Verdict per suspect with a non-empty neighbor set; true = inferred yes.
  std::map<int, bool> verdicts;

  std::vector<int> recovered() const;
};

LdInference LdInfer(const ReleaseState& state, std::span<const int> suspects,
                    const LdIndex& index, double quorum);

// Release as the attacker reconstructs it: SNVs inferred yes are unmasked
// and un-flipped.
ReleaseState ApplyInference(const ReleaseState& state,
                            const LdInference& inference);

struct AttackResult {
  CoverageReport coverage;
  std::vector<double> dataset_scores;
  std::vector<double> reference_scores;
  // "standard", or "ld-worst-case" when correlation inference was run. The
  // correlation attack is only ever pointed at SNVs known to be flipped or
  // masked, which is a worst case for the defender.
  std::string label = "standard";
  LdInference inference;
};

// Scores the release as the attacker described by `model` would, including
// correlation inference when model.ld_aware (which then needs `ld_index`).
absl::StatusOr<AttackResult> RunAttack(const GenotypePanel& panel,
                                       const BeaconConstants* consts,
                                       const ReleaseState& state,
                                       const ThreatModel& model,
                                       const LdIndex* ld_index = nullptr);

}  // namespace gpriv

#endif  // GPRIV_THREAT_H_
