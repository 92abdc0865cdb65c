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

// Exhaustive solvers for tiny instances, used as ground truth.

#ifndef GPRIV_ORACLE_H_
#define GPRIV_ORACLE_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "gpriv/dataset.h"
#include "gpriv/lrt.h"
#include "gpriv/solution.h"
#include "gpriv/threat.h"

namespace gpriv {

struct OracleLimits {
  int max_m_beacon = 12;  // flip/mask candidates, 3^12 action vectors
  int max_m_aaf = 8;
  // Released-value grid per unmasked AAF SNV, evenly spaced over
  // [kMinAaf, kMaxAaf]. The unperturbed value is always an option too.
  int aaf_levels = 21;
  // Refuse AAF enumerations larger than this many vectors.
  double max_aaf_vectors = 2e7;
};

// Minimum of the objective over {none, flip, mask} for every flip/mask
// candidate. Ties go to the lexicographically smallest action vector
// (none < flip < mask, lowest candidate index most significant).
absl::StatusOr<DefenseSolution> SolveBeaconExact(
    const GenotypePanel& panel, const BeaconConstants& consts, double alpha,
    double w, const ThreatModel& model, const OracleLimits& limits = {},
    int threads = 1);

// Minimum over {mask, unperturbed, grid levels}^m. This is the optimum of
// the grid-restricted problem only.
absl::StatusOr<DefenseSolution> SolveAafExact(
    const GenotypePanel& panel, double alpha, double w,
    const ThreatModel& model, const OracleLimits& limits = {},
    int threads = 1);

}  // namespace gpriv

#endif  // GPRIV_ORACLE_H_
