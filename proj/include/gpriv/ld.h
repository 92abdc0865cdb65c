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

#ifndef GPRIV_LD_H_
#define GPRIV_LD_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gpriv/dataset.h"

namespace gpriv {

inline constexpr int kDefaultLdWindow = 250;
inline constexpr double kDefaultLdThreshold = 0.2;

// Rows used to estimate LD.
enum class LdSource { kDataset, kReference, kBoth };

absl::StatusOr<LdSource> ParseLdSource(std::string_view name);

// LD = P(AB) - P(A)P(B), estimated from carrier indicators: P(AB) is the
// fraction of rows carrying both SNVs. Lies in [-0.25, 0.25].
double LdCoefficient(const GenotypePanel& panel, int j, int k,
                     LdSource source = LdSource::kDataset);

// N_LD(j): SNVs k != j with |j - k| <= window and LD(j, k) > threshold.
struct LdIndex {
  int window = kDefaultLdWindow;
  double threshold = kDefaultLdThreshold;
  std::vector<std::vector<int>> neighbors;  // ascending per SNV

  int num_snvs() const { return static_cast<int>(neighbors.size()); }
  std::span<const int> of(int j) const { return neighbors[j]; }
  size_t num_pairs() const;
};

// Built over disjoint SNV blocks on `threads` workers; the result does not
// depend on the thread count.
absl::StatusOr<LdIndex> BuildLdIndex(const GenotypePanel& panel, int window,
                                     double threshold,
                                     LdSource source = LdSource::kDataset,
                                     int threads = 1);

// An index with no neighbors, for SNV-independent runs.
LdIndex EmptyLdIndex(int num_snvs);

// Binary file, little-endian:
//   char[8] "GPRIVLD1", u32 window, f64 threshold, u32 m,
//   then for each SNV: u32 count, u32 neighbor[count].
absl::Status SaveLdIndex(const LdIndex& index, const std::string& path);
absl::StatusOr<LdIndex> LoadLdIndex(const std::string& path);

}  // namespace gpriv

#endif  // GPRIV_LD_H_
