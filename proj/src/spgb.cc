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
#include <cstdint>
#include <limits>
#include <queue>
#include <utility>

#include "absl/strings/str_cat.h"

namespace gpriv {

absl::StatusOr<ActionRestriction> ParseActionRestriction(
    std::string_view name) {
  if (name == "both") return ActionRestriction::kBoth;
  if (name == "flip") return ActionRestriction::kFlipOnly;
  if (name == "mask") return ActionRestriction::kMaskOnly;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown action mode '", std::string(name), "' (both|flip|mask)"));
}

std::string_view ActionRestrictionName(ActionRestriction r) {
  switch (r) {
    case ActionRestriction::kFlipOnly:
      return "flip";
    case ActionRestriction::kMaskOnly:
      return "mask";
    case ActionRestriction::kBoth:
      break;
  }
  return "both";
}

namespace {

enum Act : uint8_t { kNone = 0, kFlip = 1, kMask = 2 };

struct HeapEntry {
  double key;
  bool flip;
  int snv;
};

// Lower priority first, so the top is the largest key, then flips, then the
// lowest index.
struct HeapOrder {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.key != b.key) return a.key < b.key;
    if (a.flip != b.flip) return !a.flip;
    return a.snv > b.snv;
  }
};

class Greedy {
 public:
  Greedy(const GenotypePanel& panel, const BeaconConstants& consts,
         const SpgbConfig& config)
      : panel_(panel), consts_(consts), config_(config) {}

  absl::StatusOr<DefenseSolution> Run(SpgbTrace* trace);

 private:
  double Factor(int j) const {
    return adaptive_ ? 1.0 - static_cast<double>(bottom_count_[j]) / k_prime_
                     : 1.0;
  }
  bool Eligible(int j) const {
    return available_[j] && (!positivity_ || Factor(j) > 0.0);
  }
  double Key(int j) const {
    return uncovered_count_[j] * base_[j] * Factor(j) / ld_div_[j];
  }
  void SetCovered(int i, bool covered);
  void Apply(int j, Act act);
  void RefreshAdaptive();
  // Best eligible (key, SNV) by full scan; snv = -1 when none.
  std::pair<double, int> Scan() const;
  std::pair<double, int> PopHeap();
  void Snapshot(SpgbTrace* trace);

  const GenotypePanel& panel_;
  const BeaconConstants& consts_;
  const SpgbConfig& config_;

  int m_ = 0;
  int n_ = 0;
  bool adaptive_ = false;
  bool positivity_ = false;
  int k_prime_ = 1;
  double threshold_ = 0.0;

  std::vector<uint8_t> available_;
  std::vector<uint8_t> choice_;  // kFlip or kMask per SNV
  std::vector<double> base_;     // chosen gain / unit cost
  std::vector<double> ld_div_;
  std::vector<double> scores_;
  std::vector<double> ref_scores_;
  std::vector<uint8_t> covered_;
  int num_covered_ = 0;
  std::vector<int> uncovered_count_;  // |T_j|
  std::vector<uint8_t> in_bottom_;
  std::vector<int> bottom_count_;     // c_j

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap_;

  std::vector<std::pair<int, Act>> log_;
  int num_flips_ = 0;
  int num_masks_ = 0;
  double best_objective_ = std::numeric_limits<double>::infinity();
  size_t best_prefix_ = 0;
};

void Greedy::SetCovered(int i, bool covered) {
  if (covered_[i] == covered) return;
  covered_[i] = covered;
  num_covered_ += covered ? 1 : -1;
  const int step = covered ? -1 : 1;
  const auto row = panel_.row(Population::kDataset, i);
  for (int j = 0; j < m_; ++j) {
    if (row[j]) uncovered_count_[j] += step;
  }
}

void Greedy::Apply(int j, Act act) {
  available_[j] = 0;
  log_.emplace_back(j, act);
  const double gain = act == kFlip ? consts_.flip_gain(j) : consts_.mask_gain(j);
  (act == kFlip ? num_flips_ : num_masks_)++;
  for (const int i : panel_.carriers(Population::kDataset, j)) {
    scores_[i] += gain;
    if (!adaptive_ && !covered_[i] && scores_[i] - threshold_ >= 0.0) {
      SetCovered(i, true);
    }
  }
  if (adaptive_) {
    for (const int k : panel_.carriers(Population::kReference, j)) {
      ref_scores_[k] += gain;
    }
  }
}

void Greedy::RefreshAdaptive() {
  const std::vector<int> bottom =
      LowestPercentileMembers(ref_scores_, config_.model.k_percentile);
  std::vector<uint8_t> next(panel_.num_reference(), 0);
  double sum = 0.0;
  for (const int k : bottom) {
    next[k] = 1;
    sum += ref_scores_[k];
  }
  threshold_ = sum / bottom.size();
  for (int k = 0; k < panel_.num_reference(); ++k) {
    if (next[k] == in_bottom_[k]) continue;
    const int step = next[k] ? 1 : -1;
    const auto row = panel_.row(Population::kReference, k);
    for (int j = 0; j < m_; ++j) {
      if (row[j]) bottom_count_[j] += step;
    }
  }
  in_bottom_ = std::move(next);
  for (int i = 0; i < n_; ++i) {
    SetCovered(i, scores_[i] - threshold_ >= 0.0);
  }
}

std::pair<double, int> Greedy::Scan() const {
  double best_key = -std::numeric_limits<double>::infinity();
  int best = -1;
  for (int j = 0; j < m_; ++j) {
    if (!Eligible(j)) continue;
    const double key = Key(j);
    if (best < 0 || key > best_key ||
        (key == best_key && choice_[j] == kFlip && choice_[best] == kMask)) {
      best_key = key;
      best = j;
    }
  }
  return {best_key, best};
}

std::pair<double, int> Greedy::PopHeap() {
  while (!heap_.empty()) {
    const HeapEntry top = heap_.top();
    heap_.pop();
    if (!available_[top.snv]) continue;
    const double key = Key(top.snv);
    if (key == top.key) return {key, top.snv};
    // Keys only shrink as individuals become covered.
    if (key > 0.0) heap_.push({key, top.flip, top.snv});
  }
  return {0.0, -1};
}

void Greedy::Snapshot(SpgbTrace* trace) {
  const double u = Objective(config_.alpha, config_.w, num_flips_, num_masks_,
                             num_covered_);
  if (u <= best_objective_) {
    best_objective_ = u;
    best_prefix_ = log_.size();
  }
  if (trace != nullptr) {
    trace->coverage.push_back(num_covered_);
    trace->objective.push_back(u);
    trace->actions.push_back(num_flips_ + num_masks_);
  }
}

absl::StatusOr<DefenseSolution> Greedy::Run(SpgbTrace* trace) {
  const double alpha = config_.alpha;
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  if (!(config_.w >= 0.0)) {
    return absl::InvalidArgumentError("w must be >= 0");
  }
  if (absl::Status s = ValidateThreatModel(config_.model); !s.ok()) return s;
  if (panel_.mode() != ReleaseMode::kBeacon) {
    return absl::InvalidArgumentError("SPG-B needs a beacon panel");
  }
  m_ = panel_.num_snvs();
  n_ = panel_.num_individuals();
  if (consts_.num_snvs() != m_) {
    return absl::InvalidArgumentError("beacon constants do not fit the panel");
  }
  const LdIndex* ld = config_.ld_index;
  if (ld != nullptr && ld->num_snvs() != m_) {
    return absl::InvalidArgumentError("LD index does not fit the panel");
  }
  adaptive_ = config_.model.adaptive();
  positivity_ = adaptive_ && config_.adaptive_positivity.value_or(true);

  available_ = BeaconCandidates(panel_, consts_);
  choice_.assign(m_, kFlip);
  base_.assign(m_, 0.0);
  ld_div_.assign(m_, 1.0);
  for (int j = 0; j < m_; ++j) {
    const double flip = consts_.flip_gain(j) / alpha;
    const double mask = consts_.mask_gain(j) / (1.0 - alpha);
    switch (config_.restriction) {
      case ActionRestriction::kFlipOnly:
        choice_[j] = kFlip;
        break;
      case ActionRestriction::kMaskOnly:
        choice_[j] = kMask;
        break;
      case ActionRestriction::kBoth:
        choice_[j] = flip >= mask ? kFlip : kMask;
        break;
    }
    base_[j] = choice_[j] == kFlip ? flip : mask;
    if (ld != nullptr) {
      ld_div_[j] = std::max<size_t>(1, ld->of(j).size());
    }
  }

  const ReleaseState initial = ReleaseState::Initial(panel_);
  absl::StatusOr<std::vector<double>> d =
      BeaconScores(panel_, consts_, initial, Population::kDataset);
  if (!d.ok()) return d.status();
  scores_ = *std::move(d);
  covered_.assign(n_, 0);
  uncovered_count_.assign(m_, 0);
  for (int j = 0; j < m_; ++j) {
    uncovered_count_[j] = panel_.carrier_count(Population::kDataset, j);
  }
  if (adaptive_) {
    absl::StatusOr<std::vector<double>> r =
        BeaconScores(panel_, consts_, initial, Population::kReference);
    if (!r.ok()) return r.status();
    ref_scores_ = *std::move(r);
    k_prime_ = LowestPercentileSize(config_.model.k_percentile,
                                    panel_.num_reference());
    in_bottom_.assign(panel_.num_reference(), 0);
    bottom_count_.assign(m_, 0);
    RefreshAdaptive();
  } else {
    threshold_ = config_.model.theta;
    for (int i = 0; i < n_; ++i) {
      if (scores_[i] - threshold_ >= 0.0) SetCovered(i, true);
    }
    for (int j = 0; j < m_; ++j) {
      if (available_[j]) {
        const double key = Key(j);
        if (key > 0.0) heap_.push({key, choice_[j] == kFlip, j});
      }
    }
  }
  Snapshot(trace);

  // Without the positivity rule the adaptive search keeps going through
  // non-positive lifts, since coverage is no longer monotone.
  const bool stop_at_zero = !adaptive_ || positivity_;
  while (num_covered_ < n_) {
    const auto [key, j] = adaptive_ ? Scan() : PopHeap();
    if (j < 0 || (stop_at_zero && key <= 0.0)) break;
    const Act act = static_cast<Act>(choice_[j]);
    Apply(j, act);
    if (ld != nullptr) {
      for (const int k : ld->of(j)) {
        if (!available_[k]) continue;
        if (!config_.force_ld_propagation && !Eligible(k)) continue;
        Apply(k, act);
      }
    }
    if (adaptive_) RefreshAdaptive();
    Snapshot(trace);
  }

  DefenseSolution sol;
  sol.method = config_.run_to_full_coverage ? "mig"
               : ld != nullptr              ? "spgld"
                                            : "spgb";
  sol.mode = ReleaseMode::kBeacon;
  sol.alpha = alpha;
  sol.w = config_.w;
  const size_t prefix = config_.run_to_full_coverage ? log_.size()
                                                     : best_prefix_;
  for (size_t a = 0; a < prefix; ++a) {
    (log_[a].second == kFlip ? sol.flips : sol.masks).push_back(log_[a].first);
  }
  std::sort(sol.flips.begin(), sol.flips.end());
  std::sort(sol.masks.begin(), sol.masks.end());
  if (config_.run_to_full_coverage) sol.feasible = num_covered_ == n_;
  const LdIndex* attack_index = config_.model.ld_aware ? ld : nullptr;
  if (absl::Status s =
          EvaluateSolution(panel_, &consts_, config_.model, sol, attack_index);
      !s.ok()) {
    return s;
  }
  return sol;
}

}  // namespace

absl::StatusOr<DefenseSolution> RunSpgb(const GenotypePanel& panel,
                                        const BeaconConstants& consts,
                                        const SpgbConfig& config,
                                        SpgbTrace* trace) {
  Greedy greedy(panel, consts, config);
  return greedy.Run(trace);
}

}  // namespace gpriv
