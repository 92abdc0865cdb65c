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

#ifndef GPRIV_DATASET_H_
#define GPRIV_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace gpriv {

// Which summary is being released: Beacon yes/no responses or alternate
// allele frequencies.
enum class ReleaseMode { kBeacon, kAaf };

absl::StatusOr<ReleaseMode> ParseReleaseMode(std::string_view name);
std::string_view ReleaseModeName(ReleaseMode mode);

// The dataset D whose summary is released, or the reference population.
enum class Population { kDataset, kReference };

// Released allele frequencies are kept inside this interval so that every
// log-ratio in the AAF test stays finite.
inline constexpr double kMinAaf = 1e-4;
inline constexpr double kMaxAaf = 0.9999;

// Binary carrier matrices for the dataset and the reference population.
// Entry (i, j) is 1 iff individual i carries at least one alternate allele at
// SNV j. Frequencies are always column means of the matrices; they are never
// taken from outside. Immutable once built.
class GenotypePanel {
 public:
  // `dataset` is n x m and `reference` is n_ref x m, both row-major, holding
  // only 0 and 1. In beacon mode every reference frequency must be < 0.5.
  static absl::StatusOr<GenotypePanel> Create(ReleaseMode mode, int num_snvs,
                                              int num_individuals,
                                              int num_reference,
                                              std::vector<uint8_t> dataset,
                                              std::vector<uint8_t> reference);

  ReleaseMode mode() const { return mode_; }
  int num_snvs() const { return num_snvs_; }
  int num_individuals() const { return num_individuals_; }
  int num_reference() const { return num_reference_; }
  int size(Population who) const {
    return who == Population::kDataset ? num_individuals_ : num_reference_;
  }

  std::span<const uint8_t> row(Population who, int i) const {
    const auto& m = matrix(who);
    return std::span<const uint8_t>(m).subspan(
        static_cast<size_t>(i) * num_snvs_, num_snvs_);
  }
  bool carries(Population who, int i, int j) const {
    return matrix(who)[static_cast<size_t>(i) * num_snvs_ + j] != 0;
  }

  // Individuals of `who` carrying SNV j, ascending.
  std::span<const int> carriers(Population who, int j) const;
  int carrier_count(Population who, int j) const {
    return static_cast<int>(carriers(who, j).size());
  }

  // p_j (dataset) or p̄_j (reference).
  double aaf(Population who, int j) const { return aafs(who)[j]; }
  std::span<const double> aafs(Population who) const {
    return who == Population::kDataset ? dataset_aaf_ : reference_aaf_;
  }

  // Beacon answer for SNV j: yes iff some dataset individual carries it.
  bool beacon_response(int j) const {
    return carrier_count(Population::kDataset, j) > 0;
  }

  friend bool operator==(const GenotypePanel& a, const GenotypePanel& b) {
    return a.mode_ == b.mode_ && a.num_snvs_ == b.num_snvs_ &&
           a.dataset_ == b.dataset_ && a.reference_ == b.reference_ &&
           a.num_individuals_ == b.num_individuals_ &&
           a.num_reference_ == b.num_reference_;
  }

 private:
  struct CarrierIndex {
    std::vector<int> offsets;
    std::vector<int> members;
  };

  GenotypePanel() = default;
  const std::vector<uint8_t>& matrix(Population who) const {
    return who == Population::kDataset ? dataset_ : reference_;
  }
  static CarrierIndex BuildIndex(const std::vector<uint8_t>& matrix, int rows,
                                 int cols);

  ReleaseMode mode_ = ReleaseMode::kAaf;
  int num_snvs_ = 0;
  int num_individuals_ = 0;
  int num_reference_ = 0;
  std::vector<uint8_t> dataset_;
  std::vector<uint8_t> reference_;
  std::vector<double> dataset_aaf_;
  std::vector<double> reference_aaf_;
  CarrierIndex dataset_index_;
  CarrierIndex reference_index_;
};

// Block correlation for synthetic panels: inside a block of `length`
// consecutive SNVs, each genotype after the first copies the individual's
// genotype at the previous SNV with probability `copy_probability` and is
// drawn fresh otherwise. length <= 1 disables it.
struct CorrelationBlocks {
  int length = 0;
  double copy_probability = 0.0;
};

struct DatasetConfig {
  int num_snvs = 1000;
  int num_individuals = 400;
  int num_reference = 400;
  ReleaseMode mode = ReleaseMode::kBeacon;
  // Per-SNV carrier frequencies are drawn from Beta(beta_a, beta_b) and
  // clipped to the mode's range unless `frequencies` is non-empty, in which
  // case it is used verbatim (length num_snvs, values in [0, 1], and < 0.5
  // in beacon mode).
  double beta_a = 0.3;
  double beta_b = 1.5;
  std::vector<double> frequencies;
  uint64_t seed = 1;
  CorrelationBlocks blocks;
};

// Beta draws are clipped to [kMinAaf, kMaxAaf] in AAF mode and to
// [kMinAaf, kMaxBeaconFrequency] in beacon mode.
inline constexpr double kMaxBeaconFrequency = 0.4999;

// Per-SNV generating frequencies q_j for `config`, exactly as GeneratePanel
// draws them.
absl::StatusOr<std::vector<double>> GenerateFrequencies(
    const DatasetConfig& config);

// Synthetic panel. The seed fully determines the result. In beacon mode a
// reference column whose mean reaches 0.5 is redrawn from the same stream.
absl::StatusOr<GenotypePanel> GeneratePanel(const DatasetConfig& config);

// Text format:
//   line 1:      "m n n_ref mode"  (mode is "beacon" or "aaf")
//   n lines:     dataset genotypes, m comma-separated 0/1 symbols
//   n_ref lines: reference genotypes, same layout
//
// When `mode` is given it overrides the header's mode. Beacon panels are
// checked for the minor-allele rule.
absl::StatusOr<GenotypePanel> LoadPanel(
    const std::string& path, std::optional<ReleaseMode> mode = std::nullopt);
absl::StatusOr<GenotypePanel> ParsePanel(
    std::string_view text, std::optional<ReleaseMode> mode = std::nullopt);
absl::Status SavePanel(const GenotypePanel& panel, const std::string& path);
std::string FormatPanel(const GenotypePanel& panel);

}  // namespace gpriv

#endif  // GPRIV_DATASET_H_
