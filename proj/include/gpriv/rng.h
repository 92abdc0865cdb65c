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

#ifndef GPRIV_RNG_H_
#define GPRIV_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace gpriv {

// Portable random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The standard library distributions
// are implementation-defined, so every variate below is derived from the raw
// 64-bit engine output with a pinned algorithm:
//
//   Uniform()   top 53 bits of one engine word, scaled to [0, 1).
//   Bernoulli   Uniform() < p.
//   Normal      Marsaglia polar method (one variate per accepted pair; the
//               second variate is discarded so the stream has no hidden
//               state).
//   Gamma       Marsaglia-Tsang squeeze for shape >= 1, boosted with
//               U^(1/shape) for shape < 1.
//   Beta        X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
//   Laplace     inverse CDF, -b * sgn(u) * ln(1 - 2|u|), u = Uniform() - 0.5,
//               redrawing when Uniform() returns exactly 0.
//
// Identical seeds therefore give identical streams on every platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextWord() { return engine_(); }
  double Uniform();
  bool Bernoulli(double p) { return Uniform() < p; }
  double Normal();
  double Gamma(double shape);
  double Beta(double a, double b);
  double Laplace(double scale);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer.
uint64_t Mix64(uint64_t x);

// 64-bit FNV-1a over the bytes of `text`.
uint64_t HashName(std::string_view text);

// Derives a child seed by folding each component into `master` with Mix64:
// s = Mix64(s ^ Mix64(component + 0x9e3779b97f4a7c15)). Used for every
// per-record, per-run and per-epoch stream so that parallel schedules cannot
// change which numbers a computation sees.
uint64_t DeriveSeed(uint64_t master, std::initializer_list<uint64_t> parts);

}  // namespace gpriv

#endif  // GPRIV_RNG_H_
