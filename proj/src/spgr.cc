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

#include "gpriv/spgr.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <thread>

#include "absl/strings/str_cat.h"
#include "gpriv/lrt.h"
#include "gpriv/rng.h"

namespace gpriv {

absl::StatusOr<Sensitivity> ParseSensitivity(std::string_view name) {
  if (name == "unbounded") return Sensitivity::kUnbounded;
  if (name == "bounded") return Sensitivity::kBounded;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown sensitivity '", std::string(name), "' (unbounded|bounded)"));
}

absl::StatusOr<SpgrVariant> ParseSpgrVariant(std::string_view name) {
  if (name == "sequential") return SpgrVariant::kSequential;
  if (name == "binary") return SpgrVariant::kBinarySearch;
  if (name == "parallel") return SpgrVariant::kParallel;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown SPG-R variant '", std::string(name),
                   "' (sequential|binary|parallel)"));
}

double AverageHamming(const GenotypePanel& panel,
                      std::span<const uint8_t> active) {
  // Mismatching (dataset, reference) pairs at SNV j:
  // c_j (n_ref - r_j) + (n - c_j) r_j.
  const double n = panel.num_individuals();
  const double n_ref = panel.num_reference();
  double total = 0.0;
  for (int j = 0; j < panel.num_snvs(); ++j) {
    if (!active.empty() && !active[j]) continue;
    const double c = panel.carrier_count(Population::kDataset, j);
    const double r = panel.carrier_count(Population::kReference, j);
    total += c * (n_ref - r) + (n - c) * r;
  }
  return total / (n * n_ref);
}

double LaplaceScale(double sensitivity, int num_individuals, double epsilon) {
  return sensitivity / (num_individuals * epsilon);
}

absl::StatusOr<NoiseDraw> LaplaceNoise(int m_active, int num_individuals,
                                       double epsilon, Sensitivity mode,
                                       double avg_hamming, uint64_t seed) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (m_active < 0 || num_individuals < 1) {
    return absl::InvalidArgumentError("bad noise dimensions");
  }
  NoiseDraw draw;
  draw.epsilon = epsilon;
  const double sensitivity =
      mode == Sensitivity::kUnbounded ? m_active : avg_hamming;
  draw.scale = LaplaceScale(sensitivity, num_individuals, epsilon);
  Rng rng(seed);
  draw.delta.resize(m_active);
  for (double& d : draw.delta) d = rng.Laplace(draw.scale);
  return draw;
}

namespace {

double CandidateObjective(const SpgrCandidate& c, double alpha, double w) {
  return Objective(alpha, w, c.noise_l1, c.num_masked, c.num_covered);
}

// Total order: objective, larger epsilon, fewer masks, earlier epoch.
bool Better(const SpgrCandidate& a, double ua, const SpgrCandidate& b,
            double ub) {
  if (ua != ub) return ua < ub;
  if (a.epsilon != b.epsilon) return a.epsilon > b.epsilon;
  if (a.num_masked != b.num_masked) return a.num_masked < b.num_masked;
  return a.epoch < b.epoch;
}

struct Context {
  const GenotypePanel& panel;
  const SpgrConfig& config;
  int m = 0;
  int n = 0;
  int n_ref = 0;
  bool adaptive = false;
  std::vector<double> x;    // clipped dataset AAFs
  std::vector<double> ref;  // clipped reference AAFs
};

// Shared best record, updated under a lock.
class BestRecord {
 public:
  BestRecord(double alpha, double w) : alpha_(alpha), w_(w) {}

  void Offer(const SpgrCandidate& cand, const std::vector<uint8_t>& masked,
             const std::vector<double>& delta) {
    const double u = CandidateObjective(cand, alpha_, w_);
    std::lock_guard<std::mutex> lock(mu_);
    if (has_ && !Better(cand, u, cand_, u_)) return;
    has_ = true;
    cand_ = cand;
    u_ = u;
    masked_ = masked;
    delta_ = delta;
  }

  const SpgrCandidate& candidate() const { return cand_; }
  const std::vector<uint8_t>& masked() const { return masked_; }
  const std::vector<double>& delta() const { return delta_; }

 private:
  const double alpha_;
  const double w_;
  std::mutex mu_;
  bool has_ = false;
  SpgrCandidate cand_;
  double u_ = 0.0;
  std::vector<uint8_t> masked_;
  std::vector<double> delta_;
};

class Trajectory {
 public:
  Trajectory(const Context& ctx, double epsilon, BestRecord& best)
      : ctx_(ctx), epsilon_(epsilon), best_(best) {}

  // Epoch 0: noise everything, score, fix the masking order.
  void Start();
  bool Done() const;
  // Masks the next t SNVs, re-noises and scores. `incremental` only takes
  // effect with noise reuse, where the unmasked terms do not change.
  void Advance(bool incremental);

  double epsilon() const { return epsilon_; }
  const std::vector<SpgrCandidate>& log() const { return log_; }
  double BestObjective() const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : log_) {
      best = std::min(best, CandidateObjective(c, ctx_.config.alpha,
                                               ctx_.config.w));
    }
    return best;
  }

 private:
  bool noise_free() const { return std::isinf(epsilon_); }
  void Noise();
  void ScoreFromScratch();
  void Record();

  const Context& ctx_;
  const double epsilon_;
  BestRecord& best_;

  int epoch_ = 0;
  size_t next_ = 0;  // position in order_
  std::vector<int> order_;
  std::vector<uint8_t> masked_;
  int num_active_ = 0;
  std::vector<double> raw_;  // unit Laplace draws
  std::vector<double> delta_;
  std::vector<double> carrier_;      // per-SNV score terms of the release
  std::vector<double> non_carrier_;
  std::vector<double> scores_;
  std::vector<double> ref_scores_;
  std::vector<SpgrCandidate> log_;
};

void Trajectory::Noise() {
  const SpgrConfig& cfg = ctx_.config;
  if (noise_free()) {
    std::fill(delta_.begin(), delta_.end(), 0.0);
    return;
  }
  if (epoch_ == 0 || !cfg.noise_reuse) {
    double sensitivity = num_active_;
    if (cfg.sensitivity == Sensitivity::kBounded) {
      if (cfg.avg_hamming.has_value()) {
        sensitivity = *cfg.avg_hamming;
      } else {
        std::vector<uint8_t> active(ctx_.m);
        for (int j = 0; j < ctx_.m; ++j) active[j] = !masked_[j];
        sensitivity = AverageHamming(ctx_.panel, active);
      }
    }
    const double scale = LaplaceScale(sensitivity, ctx_.n, epsilon_);
    Rng rng(DeriveSeed(cfg.seed,
                       {static_cast<uint64_t>(cfg.run),
                        std::bit_cast<uint64_t>(epsilon_),
                        static_cast<uint64_t>(epoch_)}));
    for (int j = 0; j < ctx_.m; ++j) raw_[j] = rng.Laplace(1.0);
    for (int j = 0; j < ctx_.m; ++j) {
      const double noised =
          std::clamp(ctx_.x[j] + scale * raw_[j], kMinAaf, kMaxAaf);
      delta_[j] = noised - ctx_.x[j];
    }
  }
  for (int j = 0; j < ctx_.m; ++j) {
    if (masked_[j]) delta_[j] = 0.0;
  }
}

void Trajectory::ScoreFromScratch() {
  // Same term construction and summation order as AafScores, so candidate
  // coverage agrees exactly with the shared metrics path.
  for (int j = 0; j < ctx_.m; ++j) {
    if (masked_[j]) {
      carrier_[j] = 0.0;
      non_carrier_[j] = 0.0;
      continue;
    }
    const double released = ctx_.x[j] + delta_[j];
    carrier_[j] = AafCarrierTerm(ctx_.ref[j], released);
    non_carrier_[j] = AafNonCarrierTerm(ctx_.ref[j], released);
  }
  auto fill = [&](Population who, std::vector<double>& out) {
    out.assign(ctx_.panel.size(who), 0.0);
    for (int i = 0; i < ctx_.panel.size(who); ++i) {
      const auto row = ctx_.panel.row(who, i);
      double sum = 0.0;
      for (int j = 0; j < ctx_.m; ++j) {
        sum += row[j] ? carrier_[j] : non_carrier_[j];
      }
      out[i] = sum;
    }
  };
  fill(Population::kDataset, scores_);
  if (ctx_.adaptive) fill(Population::kReference, ref_scores_);
}

void Trajectory::Record() {
  SpgrCandidate cand;
  cand.epsilon = epsilon_;
  cand.epoch = epoch_;
  cand.num_masked = ctx_.m - num_active_;
  double l1 = 0.0;
  for (int j = 0; j < ctx_.m; ++j) {
    if (!masked_[j]) l1 += std::fabs(delta_[j]);
  }
  cand.noise_l1 = l1;
  double threshold = ctx_.config.model.theta;
  if (ctx_.adaptive) {
    threshold = *AdaptiveThreshold(ref_scores_, ctx_.config.model.k_percentile);
  }
  for (const double s : scores_) cand.num_covered += s - threshold >= 0.0;
  log_.push_back(cand);
  best_.Offer(cand, masked_, delta_);
}

void Trajectory::Start() {
  const int m = ctx_.m;
  masked_.assign(m, 0);
  num_active_ = m;
  raw_.assign(m, 0.0);
  delta_.assign(m, 0.0);
  carrier_.assign(m, 0.0);
  non_carrier_.assign(m, 0.0);
  Noise();
  ScoreFromScratch();
  Record();
  if (!ctx_.config.enable_masking) return;

  // Average mask marginal over D, minus its average over the K' lowest
  // reference individuals against the adaptive attacker.
  const GenotypePanel& panel = ctx_.panel;
  std::vector<double> key(m);
  for (int j = 0; j < m; ++j) {
    const int c = panel.carrier_count(Population::kDataset, j);
    key[j] = -(c * carrier_[j] + (ctx_.n - c) * non_carrier_[j]) / ctx_.n;
  }
  if (ctx_.adaptive) {
    const std::vector<int> bottom =
        LowestPercentileMembers(ref_scores_, ctx_.config.model.k_percentile);
    std::vector<double> sum(m, 0.0);
    for (const int k : bottom) {
      const auto row = panel.row(Population::kReference, k);
      for (int j = 0; j < m; ++j) {
        sum[j] -= row[j] ? carrier_[j] : non_carrier_[j];
      }
    }
    for (int j = 0; j < m; ++j) key[j] -= sum[j] / bottom.size();
  }
  order_.resize(m);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(),
                   [&](int a, int b) { return key[a] > key[b]; });
}

bool Trajectory::Done() const {
  if (!ctx_.config.enable_masking) return true;
  if (ctx_.config.max_epochs.has_value() && epoch_ >= *ctx_.config.max_epochs) {
    return true;
  }
  return next_ >= order_.size();
}

void Trajectory::Advance(bool incremental) {
  const size_t end =
      std::min(order_.size(), next_ + static_cast<size_t>(ctx_.config.t));
  std::vector<int> newly(order_.begin() + next_, order_.begin() + end);
  next_ = end;
  ++epoch_;
  for (const int j : newly) masked_[j] = 1;
  num_active_ -= static_cast<int>(newly.size());
  const bool reuse = incremental && ctx_.config.noise_reuse;
  if (reuse) {
    auto drop = [&](Population who, std::vector<double>& out) {
      for (int i = 0; i < ctx_.panel.size(who); ++i) {
        for (const int j : newly) {
          out[i] -= ctx_.panel.carries(who, i, j) ? carrier_[j]
                                                  : non_carrier_[j];
        }
      }
    };
    drop(Population::kDataset, scores_);
    if (ctx_.adaptive) drop(Population::kReference, ref_scores_);
    for (const int j : newly) {
      carrier_[j] = 0.0;
      non_carrier_[j] = 0.0;
    }
    Noise();
  } else {
    Noise();
    ScoreFromScratch();
  }
  Record();
}

}  // namespace

size_t BestCandidate(std::span<const SpgrCandidate> log, double alpha,
                     double w) {
  size_t best = 0;
  for (size_t c = 1; c < log.size(); ++c) {
    if (Better(log[c], CandidateObjective(log[c], alpha, w), log[best],
               CandidateObjective(log[best], alpha, w))) {
      best = c;
    }
  }
  return best;
}

absl::StatusOr<SpgrResult> RunSpgr(const GenotypePanel& panel,
                                   const SpgrConfig& config) {
  if (panel.mode() != ReleaseMode::kAaf) {
    return absl::InvalidArgumentError("SPG-R needs an AAF panel");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  if (!(config.w >= 0.0)) return absl::InvalidArgumentError("w must be >= 0");
  if (config.t < 1) return absl::InvalidArgumentError("t must be >= 1");
  if (config.threads < 0) return absl::InvalidArgumentError("threads < 0");
  if (config.enable_noise) {
    if (config.epsilons.empty()) {
      return absl::InvalidArgumentError("the epsilon set is empty");
    }
    for (const double e : config.epsilons) {
      if (!(e > 0.0) || std::isinf(e)) {
        return absl::InvalidArgumentError(
            absl::StrCat("epsilon must be positive and finite, got ", e));
      }
    }
  }
  if (!config.enable_noise && !config.enable_masking) {
    return absl::InvalidArgumentError("both noise and masking are disabled");
  }
  if (!(config.binary_ratio > 1.0)) {
    return absl::InvalidArgumentError("binary search ratio must exceed 1");
  }
  if (absl::Status s = ValidateThreatModel(config.model); !s.ok()) return s;

  Context ctx{panel, config, 0, 0, 0, false, {}, {}};
  ctx.m = panel.num_snvs();
  ctx.n = panel.num_individuals();
  ctx.n_ref = panel.num_reference();
  ctx.adaptive = config.model.adaptive();
  ctx.x = ReleaseState::Initial(panel).x;
  ctx.ref.resize(ctx.m);
  for (int j = 0; j < ctx.m; ++j) ctx.ref[j] = ClampedReferenceAaf(panel, j);

  BestRecord best(config.alpha, config.w);
  std::vector<std::unique_ptr<Trajectory>> trajectories;
  auto add = [&](double eps) {
    trajectories.push_back(std::make_unique<Trajectory>(ctx, eps, best));
    return trajectories.back().get();
  };
  auto run_through = [](Trajectory* traj, bool incremental) {
    traj->Start();
    while (!traj->Done()) traj->Advance(incremental);
  };

  std::vector<double> eps_set;
  if (config.enable_noise && config.variant != SpgrVariant::kBinarySearch) {
    eps_set = config.epsilons;
  }
  if (!config.enable_noise || config.include_noise_free) {
    eps_set.push_back(kNoiseFree);
  }

  switch (config.variant) {
    case SpgrVariant::kSequential: {
      for (const double e : eps_set) add(e)->Start();
      bool any = true;
      while (any) {
        any = false;
        for (auto& traj : trajectories) {
          if (traj->Done()) continue;
          traj->Advance(/*incremental=*/false);
          any = true;
        }
      }
      break;
    }
    case SpgrVariant::kParallel: {
      for (const double e : eps_set) add(e);
      const int count = static_cast<int>(trajectories.size());
      const int workers =
          config.threads == 0 ? count : std::min(count, config.threads);
      std::atomic<int> next{0};
      auto work = [&] {
        for (int k = next++; k < count; k = next++) {
          run_through(trajectories[k].get(), /*incremental=*/true);
        }
      };
      if (workers <= 1) {
        work();
      } else {
        std::vector<std::jthread> pool;
        for (int k = 0; k < workers; ++k) pool.emplace_back(work);
      }
      break;
    }
    case SpgrVariant::kBinarySearch: {
      for (const double e : eps_set) run_through(add(e), false);
      if (config.enable_noise) {
        double lo = *std::min_element(config.epsilons.begin(),
                                      config.epsilons.end());
        double hi = *std::max_element(config.epsilons.begin(),
                                      config.epsilons.end());
        auto eval = [&](double eps) {
          Trajectory* traj = add(eps);
          run_through(traj, false);
          return traj->BestObjective();
        };
        double f_lo = eval(lo);
        double f_hi = hi > lo ? eval(hi) : f_lo;
        while (hi / lo >= config.binary_ratio) {
          const double mid = std::sqrt(lo * hi);
          const double f_mid = eval(mid);
          if (f_lo <= f_hi) {
            hi = mid;
            f_hi = f_mid;
          } else {
            lo = mid;
            f_lo = f_mid;
          }
        }
      }
      break;
    }
  }

  SpgrResult result;
  for (const auto& traj : trajectories) {
    result.log.insert(result.log.end(), traj->log().begin(), traj->log().end());
  }
  result.best = BestCandidate(result.log, config.alpha, config.w);

  DefenseSolution& sol = result.solution;
  sol.method = !config.enable_masking ? "dplaplace"
               : !config.enable_noise ? "maskonly"
                                      : "spgr";
  sol.mode = ReleaseMode::kAaf;
  sol.alpha = config.alpha;
  sol.w = config.w;
  sol.delta = best.delta();
  for (int j = 0; j < ctx.m; ++j) {
    if (best.masked()[j]) {
      sol.masks.push_back(j);
      sol.delta[j] = 0.0;
    }
  }
  if (absl::Status s = EvaluateSolution(panel, nullptr, config.model, sol);
      !s.ok()) {
    return s;
  }
  return result;
}

}  // namespace gpriv
