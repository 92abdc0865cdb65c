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

#include "gpriv/threat.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace gpriv {

std::string ThreatModel::KindName() const {
  return adaptive() ? "adaptive" : "fixed";
}

absl::Status ValidateThreatModel(const ThreatModel& model) {
  if (model.adaptive() &&
      !(model.k_percentile > 0.0 && model.k_percentile <= 100.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("K must lie in (0, 100], got ", model.k_percentile));
  }
  if (model.ld_aware) {
    if (!(model.ld.quorum > 0.0 && model.ld.quorum <= 1.0)) {
      return absl::InvalidArgumentError("LD quorum must lie in (0, 1]");
    }
    if (model.ld.window < 0) {
      return absl::InvalidArgumentError("LD window must be >= 0");
    }
  }
  return absl::OkStatus();
}

int LowestPercentileSize(double k_percentile, int num_reference) {
  // K * n_ref is exact for integral K, so the division is too.
  const double raw = k_percentile * num_reference / 100.0;
  const int size = static_cast<int>(std::ceil(raw - 1e-9));
  return std::clamp(size, 1, num_reference);
}

std::vector<int> LowestPercentileMembers(std::span<const double> ref_scores,
                                         double k_percentile) {
  const int size =
      LowestPercentileSize(k_percentile, static_cast<int>(ref_scores.size()));
  std::vector<int> order(ref_scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + size, order.end(),
                    [&](int a, int b) {
                      if (ref_scores[a] != ref_scores[b]) {
                        return ref_scores[a] < ref_scores[b];
                      }
                      return a < b;
                    });
  order.resize(size);
  return order;
}

absl::StatusOr<double> AdaptiveThreshold(std::span<const double> ref_scores,
                                         double k_percentile) {
  if (ref_scores.empty()) {
    return absl::InvalidArgumentError("no reference scores");
  }
  if (!(k_percentile > 0.0 && k_percentile <= 100.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("K must lie in (0, 100], got ", k_percentile));
  }
  const std::vector<int> members =
      LowestPercentileMembers(ref_scores, k_percentile);
  double sum = 0.0;
  for (const int k : members) sum += ref_scores[k];
  return sum / members.size();
}

absl::StatusOr<double> AttackThreshold(const ThreatModel& model,
                                       std::span<const double> ref_scores) {
  if (!model.adaptive()) return model.theta;
  return AdaptiveThreshold(ref_scores, model.k_percentile);
}

CoverageReport CoverageAt(double threshold,
                          std::span<const double> dataset_scores) {
  CoverageReport report;
  report.threshold = threshold;
  report.margins.resize(dataset_scores.size());
  for (size_t i = 0; i < dataset_scores.size(); ++i) {
    report.margins[i] = dataset_scores[i] - threshold;
    if (report.margins[i] >= 0.0) {
      report.covered.push_back(static_cast<int>(i));
    }
  }
  return report;
}

absl::StatusOr<CoverageReport> Coverage(const ThreatModel& model,
                                        std::span<const double> dataset_scores,
                                        std::span<const double> ref_scores) {
  absl::StatusOr<double> threshold = AttackThreshold(model, ref_scores);
  if (!threshold.ok()) return threshold.status();
  return CoverageAt(*threshold, dataset_scores);
}

std::vector<int> LdInference::recovered() const {
  std::vector<int> out;
  for (const auto& [j, yes] : verdicts) {
    if (yes) out.push_back(j);
  }
  return out;
}

LdInference LdInfer(const ReleaseState& state, std::span<const int> suspects,
                    const LdIndex& index, double quorum) {
  LdInference inference;
  for (const int j : suspects) {
    const auto neighbors = index.of(j);
    if (neighbors.empty()) continue;
    int yes = 0;
    for (const int k : neighbors) {
      if (!state.masked[k] && state.released(k) == 1.0) ++yes;
    }
    // Counts are small integers, so the comparison is exact up to the
    // representation of quorum * size.
    inference.verdicts[j] =
        yes >= quorum * static_cast<double>(neighbors.size()) - 1e-12;
  }
  return inference;
}

ReleaseState ApplyInference(const ReleaseState& state,
                            const LdInference& inference) {
  ReleaseState out = state;
  for (const auto& [j, yes] : inference.verdicts) {
    if (!yes) continue;
    out.masked[j] = 0;
    out.flipped[j] = 0;
    out.x[j] = 1.0;
  }
  return out;
}

absl::StatusOr<AttackResult> RunAttack(const GenotypePanel& panel,
                                       const BeaconConstants* consts,
                                       const ReleaseState& state,
                                       const ThreatModel& model,
                                       const LdIndex* ld_index) {
  if (absl::Status s = ValidateThreatModel(model); !s.ok()) return s;
  AttackResult result;
  const ReleaseState* scored = &state;
  ReleaseState reconstructed;
  if (model.ld_aware) {
    if (state.mode != ReleaseMode::kBeacon) {
      return absl::InvalidArgumentError(
          "the correlation attack targets beacon releases");
    }
    if (ld_index == nullptr || ld_index->num_snvs() != panel.num_snvs()) {
      return absl::InvalidArgumentError(
          "the correlation attack needs an LD index for this panel");
    }
    std::vector<int> suspects;
    for (int j = 0; j < state.num_snvs(); ++j) {
      if (state.masked[j] || state.flipped[j]) suspects.push_back(j);
    }
    result.inference = LdInfer(state, suspects, *ld_index, model.ld.quorum);
    reconstructed = ApplyInference(state, result.inference);
    scored = &reconstructed;
    result.label = "ld-worst-case";
  }
  absl::StatusOr<std::vector<double>> d =
      Scores(panel, consts, *scored, Population::kDataset);
  if (!d.ok()) return d.status();
  absl::StatusOr<std::vector<double>> r =
      Scores(panel, consts, *scored, Population::kReference);
  if (!r.ok()) return r.status();
  result.dataset_scores = *std::move(d);
  result.reference_scores = *std::move(r);
  absl::StatusOr<CoverageReport> coverage =
      Coverage(model, result.dataset_scores, result.reference_scores);
  if (!coverage.ok()) return coverage.status();
  result.coverage = *std::move(coverage);
  return result;
}

}  // namespace gpriv
