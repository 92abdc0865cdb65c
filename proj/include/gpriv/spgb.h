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

// Greedy flip/mask defense for Beacons.
//
// Each iteration picks the (SNV, action) pair with the largest average
// marginal score lift per unit cost over the still-unprotected individuals P:
//
//   flip: |T_j| (B_j - A_j) / (alpha |P|)
//   mask: |T_j| (-A_j) / ((1 - alpha) |P|)
//
// where T_j are the members of P carrying SNV j. Against the adaptive
// attacker both lifts are scaled by (1 - c_j / K'), c_j being the number of
// the K' lowest-scoring reference individuals that carry j. Coverage is
// recomputed from the tentative action sets after every step and the best
// objective snapshot is returned.
//
// With an LD index the lifts are divided by max(1, |N_LD(j)|) and every
// action is copied to the eligible members of N_LD(j).

#ifndef GPRIV_SPGB_H_
#define GPRIV_SPGB_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "gpriv/dataset.h"
#include "gpriv/ld.h"
#include "gpriv/lrt.h"
#include "gpriv/solution.h"
#include "gpriv/threat.h"

namespace gpriv {

enum class ActionRestriction { kBoth, kFlipOnly, kMaskOnly };

absl::StatusOr<ActionRestriction> ParseActionRestriction(std::string_view name);
std::string_view ActionRestrictionName(ActionRestriction r);

struct SpgbConfig {
  double alpha = 0.5;
  double w = 1.0;
  ThreatModel model;
  ActionRestriction restriction = ActionRestriction::kBoth;
  // Only act on SNVs whose adaptive lift is strictly positive. Defaults to on
  // for the adaptive attacker; ignored for the fixed one.
  std::optional<bool> adaptive_positivity;
  // Non-null turns on the LD-hardened variant.
  const LdIndex* ld_index = nullptr;
  // Copy actions to LD neighbors even when the positivity rule excludes
  // them.
  bool force_ld_propagation = false;
  // Keep acting until every individual is protected and return that state
  // rather than the best snapshot.
  bool run_to_full_coverage = false;
};

// One entry per snapshot, starting with the do-nothing state.
struct SpgbTrace {
  std::vector<int> coverage;
  std::vector<double> objective;
  std::vector<int> actions;  // cumulative |F| + |M|
};

absl::StatusOr<DefenseSolution> RunSpgb(const GenotypePanel& panel,
                                        const BeaconConstants& consts,
                                        const SpgbConfig& config,
                                        SpgbTrace* trace = nullptr);

}  // namespace gpriv

#endif  // GPRIV_SPGB_H_
