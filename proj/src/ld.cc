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

#include "gpriv/ld.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <thread>

#include "absl/strings/str_cat.h"

namespace gpriv {

absl::StatusOr<LdSource> ParseLdSource(std::string_view name) {
  if (name == "dataset") return LdSource::kDataset;
  if (name == "reference") return LdSource::kReference;
  if (name == "both") return LdSource::kBoth;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown LD source '", std::string(name), "' (dataset|reference|both)"));
}

namespace {

// Column-major bitsets of the rows selected by `source`.
class ColumnBits {
 public:
  ColumnBits(const GenotypePanel& panel, LdSource source) {
    std::vector<Population> pops;
    if (source != LdSource::kReference) pops.push_back(Population::kDataset);
    if (source != LdSource::kDataset) pops.push_back(Population::kReference);
    for (const Population p : pops) rows_ += panel.size(p);
    words_ = (rows_ + 63) / 64;
    const int m = panel.num_snvs();
    bits_.assign(static_cast<size_t>(m) * words_, 0);
    counts_.assign(m, 0);
    int offset = 0;
    for (const Population p : pops) {
      for (int j = 0; j < m; ++j) {
        for (const int i : panel.carriers(p, j)) {
          const int r = offset + i;
          bits_[static_cast<size_t>(j) * words_ + r / 64] |= uint64_t{1}
                                                             << (r % 64);
        }
        counts_[j] += panel.carrier_count(p, j);
      }
      offset += panel.size(p);
    }
  }

  double Coefficient(int j, int k) const {
    const uint64_t* a = bits_.data() + static_cast<size_t>(j) * words_;
    const uint64_t* b = bits_.data() + static_cast<size_t>(k) * words_;
    int both = 0;
    for (int w = 0; w < words_; ++w) both += std::popcount(a[w] & b[w]);
    const double n = rows_;
    return both / n - (counts_[j] / n) * (counts_[k] / n);
  }

 private:
  int rows_ = 0;
  int words_ = 0;
  std::vector<uint64_t> bits_;
  std::vector<int> counts_;
};

void PutU32(std::string& out, uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>(v >> (8 * b)));
}

void PutF64(std::string& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>(bits >> (8 * b)));
}

class Reader {
 public:
  explicit Reader(const std::string& data) : data_(data) {}
  bool U32(uint32_t& v) {
    if (pos_ + 4 > data_.size()) return false;
    v = 0;
    for (int b = 0; b < 4; ++b) {
      v |= static_cast<uint32_t>(static_cast<unsigned char>(data_[pos_ + b]))
           << (8 * b);
    }
    pos_ += 4;
    return true;
  }
  bool F64(double& v) {
    if (pos_ + 8 > data_.size()) return false;
    uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<uint64_t>(static_cast<unsigned char>(data_[pos_ + b]))
              << (8 * b);
    }
    std::memcpy(&v, &bits, sizeof(v));
    pos_ += 8;
    return true;
  }
  bool Bytes(size_t count, std::string& out) {
    if (pos_ + count > data_.size()) return false;
    out = data_.substr(pos_, count);
    pos_ += count;
    return true;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  const std::string& data_;
  size_t pos_ = 0;
};

constexpr char kMagic[] = "GPRIVLD1";

}  // namespace

double LdCoefficient(const GenotypePanel& panel, int j, int k,
                     LdSource source) {
  std::vector<Population> pops;
  if (source != LdSource::kReference) pops.push_back(Population::kDataset);
  if (source != LdSource::kDataset) pops.push_back(Population::kReference);
  int rows = 0;
  int both = 0;
  int count_j = 0;
  int count_k = 0;
  for (const Population p : pops) {
    rows += panel.size(p);
    for (int i = 0; i < panel.size(p); ++i) {
      const bool a = panel.carries(p, i, j);
      const bool b = panel.carries(p, i, k);
      both += a && b;
      count_j += a;
      count_k += b;
    }
  }
  const double n = rows;
  return both / n - (count_j / n) * (count_k / n);
}

size_t LdIndex::num_pairs() const {
  size_t total = 0;
  for (const auto& list : neighbors) total += list.size();
  return total / 2;
}

LdIndex EmptyLdIndex(int num_snvs) {
  LdIndex index;
  index.window = 0;
  index.neighbors.resize(num_snvs);
  return index;
}

absl::StatusOr<LdIndex> BuildLdIndex(const GenotypePanel& panel, int window,
                                     double threshold, LdSource source,
                                     int threads) {
  if (window < 0) {
    return absl::InvalidArgumentError("LD window must be >= 0");
  }
  const int m = panel.num_snvs();
  const ColumnBits bits(panel, source);
  LdIndex index;
  index.window = window;
  index.threshold = threshold;
  index.neighbors.resize(m);

  // Each SNV's list is computed independently (both directions), so blocks
  // write disjoint entries.
  auto fill = [&](int begin, int end) {
    for (int j = begin; j < end; ++j) {
      const int lo = std::max(0, j - window);
      const int hi = std::min(m - 1, j + window);
      for (int k = lo; k <= hi; ++k) {
        if (k != j && bits.Coefficient(j, k) > threshold) {
          index.neighbors[j].push_back(k);
        }
      }
    }
  };
  threads = std::max(1, threads);
  if (threads == 1 || m < 2 * threads) {
    fill(0, m);
  } else {
    std::vector<std::jthread> workers;
    const int block = (m + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * block;
      const int end = std::min(m, begin + block);
      if (begin < end) workers.emplace_back(fill, begin, end);
    }
  }
  return index;
}

absl::Status SaveLdIndex(const LdIndex& index, const std::string& path) {
  std::string out(kMagic, 8);
  PutU32(out, static_cast<uint32_t>(index.window));
  PutF64(out, index.threshold);
  PutU32(out, static_cast<uint32_t>(index.num_snvs()));
  for (const auto& list : index.neighbors) {
    PutU32(out, static_cast<uint32_t>(list.size()));
    for (const int k : list) PutU32(out, static_cast<uint32_t>(k));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<LdIndex> LoadLdIndex(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  const std::string data((std::istreambuf_iterator<char>(file)),
                         std::istreambuf_iterator<char>());
  Reader in(data);
  std::string magic;
  uint32_t window = 0;
  uint32_t m = 0;
  LdIndex index;
  if (!in.Bytes(8, magic) || magic != std::string(kMagic, 8) ||
      !in.U32(window) || !in.F64(index.threshold) || !in.U32(m)) {
    return absl::DataLossError(absl::StrCat(path, ": not an LD index file"));
  }
  index.window = static_cast<int>(window);
  index.neighbors.resize(m);
  for (uint32_t j = 0; j < m; ++j) {
    uint32_t count = 0;
    if (!in.U32(count)) return absl::DataLossError("truncated LD index");
    index.neighbors[j].resize(count);
    for (uint32_t c = 0; c < count; ++c) {
      uint32_t k = 0;
      if (!in.U32(k) || k >= m) {
        return absl::DataLossError("corrupt LD neighbor list");
      }
      index.neighbors[j][c] = static_cast<int>(k);
    }
  }
  if (!in.done()) return absl::DataLossError("trailing bytes in LD index");
  return index;
}

}  // namespace gpriv
