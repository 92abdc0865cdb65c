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

#include "gpriv/oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"

namespace gpriv {
namespace {

struct Best {
  double objective = std::numeric_limits<double>::infinity();
  uint64_t code = 0;
};

// Scores every individual of `who` with per-SNV terms, summing in SNV order
// exactly like the scoring functions do.
void FillScores(const GenotypePanel& panel, Population who,
                const std::vector<double>& carrier,
                const std::vector<double>& non_carrier,
                std::vector<double>& out) {
  const int m = panel.num_snvs();
  out.resize(panel.size(who));
  for (int i = 0; i < panel.size(who); ++i) {
    const auto row = panel.row(who, i);
    double sum = 0.0;
    for (int j = 0; j < m; ++j) sum += row[j] ? carrier[j] : non_carrier[j];
    out[i] = sum;
  }
}

int CountCovered(const ThreatModel& model, const std::vector<double>& scores,
                 const std::vector<double>& ref_scores) {
  const double threshold =
      model.adaptive() ? *AdaptiveThreshold(ref_scores, model.k_percentile)
                       : model.theta;
  int covered = 0;
  for (const double s : scores) covered += s - threshold >= 0.0;
  return covered;
}

// Splits [0, total) into contiguous ranges, one per thread, and reduces to
// the lowest objective, ties to the lowest code.
Best Enumerate(uint64_t total, int threads,
               const std::function<Best(uint64_t, uint64_t)>& search) {
  threads = std::max(1, threads);
  const uint64_t parts = std::min<uint64_t>(threads, total);
  std::vector<Best> results(parts);
  {
    std::vector<std::jthread> pool;
    for (uint64_t p = 0; p < parts; ++p) {
      const uint64_t begin = total * p / parts;
      const uint64_t end = total * (p + 1) / parts;
      if (parts == 1) {
        results[p] = search(begin, end);
      } else {
        pool.emplace_back([&, p, begin, end] { results[p] = search(begin, end); });
      }
    }
  }
  Best best;
  bool any = false;
  for (const Best& b : results) {
    if (!any || b.objective < best.objective ||
        (b.objective == best.objective && b.code < best.code)) {
      best = b;
      any = true;
    }
  }
  return best;
}

uint64_t Power(uint64_t base, int exp) {
  uint64_t out = 1;
  for (int e = 0; e < exp; ++e) out *= base;
  return out;
}

}  // namespace

absl::StatusOr<DefenseSolution> SolveBeaconExact(
    const GenotypePanel& panel, const BeaconConstants& consts, double alpha,
    double w, const ThreatModel& model, const OracleLimits& limits,
    int threads) {
  if (panel.mode() != ReleaseMode::kBeacon) {
    return absl::InvalidArgumentError("beacon oracle needs a beacon panel");
  }
  if (absl::Status s = ValidateThreatModel(model); !s.ok()) return s;
  const int m = panel.num_snvs();
  const std::vector<uint8_t> is_candidate = BeaconCandidates(panel, consts);
  std::vector<int> candidates;
  for (int j = 0; j < m; ++j) {
    if (is_candidate[j]) candidates.push_back(j);
  }
  const int k = static_cast<int>(candidates.size());
  if (k > limits.max_m_beacon) {
    return absl::InvalidArgumentError(
        absl::StrCat("oracle limit exceeded: ", k, " candidates > ",
                     limits.max_m_beacon));
  }
  // Untouched release terms; candidates are overwritten per vector.
  std::vector<double> base(m, 0.0);
  for (int j = 0; j < m; ++j) {
    base[j] = panel.beacon_response(j) ? consts.a[j] : consts.b[j];
  }
  const std::vector<double> zeros(m, 0.0);
  const bool adaptive = model.adaptive();

  auto search = [&](uint64_t begin, uint64_t end) {
    Best best;
    std::vector<double> term(m);
    std::vector<double> scores;
    std::vector<double> ref_scores;
    for (uint64_t code = begin; code < end; ++code) {
      term = base;
      int flips = 0;
      int masks = 0;
      uint64_t rest = code;
      for (int c = k - 1; c >= 0; --c) {
        const int digit = static_cast<int>(rest % 3);
        rest /= 3;
        const int j = candidates[c];
        if (digit == 1) {
          term[j] = consts.b[j];
          ++flips;
        } else if (digit == 2) {
          term[j] = 0.0;
          ++masks;
        }
      }
      FillScores(panel, Population::kDataset, term, zeros, scores);
      if (adaptive) {
        FillScores(panel, Population::kReference, term, zeros, ref_scores);
      }
      const double u = Objective(alpha, w, flips, masks,
                                 CountCovered(model, scores, ref_scores));
      if (u < best.objective) {
        best.objective = u;
        best.code = code;
      }
    }
    return best;
  };
  const Best best = Enumerate(Power(3, k), threads, search);

  DefenseSolution sol;
  sol.method = "oracle";
  sol.mode = ReleaseMode::kBeacon;
  sol.alpha = alpha;
  sol.w = w;
  uint64_t rest = best.code;
  for (int c = k - 1; c >= 0; --c) {
    const int digit = static_cast<int>(rest % 3);
    rest /= 3;
    if (digit == 1) sol.flips.push_back(candidates[c]);
    if (digit == 2) sol.masks.push_back(candidates[c]);
  }
  std::sort(sol.flips.begin(), sol.flips.end());
  std::sort(sol.masks.begin(), sol.masks.end());
  if (absl::Status s = EvaluateSolution(panel, &consts, model, sol); !s.ok()) {
    return s;
  }
  return sol;
}

absl::StatusOr<DefenseSolution> SolveAafExact(const GenotypePanel& panel,
                                              double alpha, double w,
                                              const ThreatModel& model,
                                              const OracleLimits& limits,
                                              int threads) {
  if (panel.mode() != ReleaseMode::kAaf) {
    return absl::InvalidArgumentError("AAF oracle needs an AAF panel");
  }
  if (absl::Status s = ValidateThreatModel(model); !s.ok()) return s;
  const int m = panel.num_snvs();
  if (m > limits.max_m_aaf) {
    return absl::InvalidArgumentError(absl::StrCat(
        "oracle limit exceeded: m = ", m, " > ", limits.max_m_aaf));
  }
  if (limits.aaf_levels < 0) {
    return absl::InvalidArgumentError("grid levels must be >= 0");
  }
  const int options = limits.aaf_levels + 2;
  if (std::pow(static_cast<double>(options), m) > limits.max_aaf_vectors) {
    return absl::InvalidArgumentError(absl::StrCat(
        "oracle grid too large: ", options, "^", m, " vectors"));
  }
  const std::vector<double> x = ReleaseState::Initial(panel).x;
  // Option 0 masks, option 1 releases x unchanged, option 2 + l releases
  // grid level l.
  std::vector<double> grid(limits.aaf_levels);
  for (int l = 0; l < limits.aaf_levels; ++l) {
    grid[l] = limits.aaf_levels == 1
                  ? kMinAaf
                  : kMinAaf + (kMaxAaf - kMinAaf) * l / (limits.aaf_levels - 1);
  }
  std::vector<std::vector<double>> delta(m), carrier(m), non_carrier(m);
  for (int j = 0; j < m; ++j) {
    const double ref = ClampedReferenceAaf(panel, j);
    delta[j].assign(options, 0.0);
    carrier[j].assign(options, 0.0);
    non_carrier[j].assign(options, 0.0);
    for (int o = 1; o < options; ++o) {
      delta[j][o] = o == 1 ? 0.0 : grid[o - 2] - x[j];
      const double released = x[j] + delta[j][o];
      carrier[j][o] = AafCarrierTerm(ref, released);
      non_carrier[j][o] = AafNonCarrierTerm(ref, released);
    }
  }
  const bool adaptive = model.adaptive();

  auto search = [&](uint64_t begin, uint64_t end) {
    Best best;
    std::vector<double> c_term(m), n_term(m);
    std::vector<double> scores, ref_scores;
    for (uint64_t code = begin; code < end; ++code) {
      uint64_t rest = code;
      int masks = 0;
      double l1 = 0.0;
      std::vector<int> choice(m);
      for (int j = m - 1; j >= 0; --j) {
        choice[j] = static_cast<int>(rest % options);
        rest /= options;
      }
      for (int j = 0; j < m; ++j) {
        const int o = choice[j];
        c_term[j] = carrier[j][o];
        n_term[j] = non_carrier[j][o];
        if (o == 0) {
          ++masks;
        } else {
          l1 += std::fabs(delta[j][o]);
        }
      }
      FillScores(panel, Population::kDataset, c_term, n_term, scores);
      if (adaptive) {
        FillScores(panel, Population::kReference, c_term, n_term, ref_scores);
      }
      const double u =
          Objective(alpha, w, l1, masks, CountCovered(model, scores, ref_scores));
      if (u < best.objective) {
        best.objective = u;
        best.code = code;
      }
    }
    return best;
  };
  const Best best = Enumerate(Power(options, m), threads, search);

  DefenseSolution sol;
  sol.method = "oracle";
  sol.mode = ReleaseMode::kAaf;
  sol.alpha = alpha;
  sol.w = w;
  sol.delta.assign(m, 0.0);
  uint64_t rest = best.code;
  for (int j = m - 1; j >= 0; --j) {
    const int o = static_cast<int>(rest % options);
    rest /= options;
    if (o == 0) {
      sol.masks.push_back(j);
    } else {
      sol.delta[j] = delta[j][o];
    }
  }
  std::sort(sol.masks.begin(), sol.masks.end());
  if (absl::Status s = EvaluateSolution(panel, nullptr, model, sol); !s.ok()) {
    return s;
  }
  return sol;
}

}  // namespace gpriv
