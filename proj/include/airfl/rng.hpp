// Copyright 2026 The AirFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "airfl/types.hpp"

namespace airfl {

// Purpose tags for hierarchical stream splitting. Every random quantity in a
// run is a pure function of (experiment seed, tags...), so adding consumers
// to one stream never perturbs any other stream.
namespace stream {
inline constexpr std::uint64_t kTrial = 0x7472696cULL;      // "tril"
inline constexpr std::uint64_t kGeometry = 0x67656f6dULL;   // "geom"
inline constexpr std::uint64_t kTask = 0x7461736bULL;       // "task"
inline constexpr std::uint64_t kInit = 0x696e6974ULL;       // "init"
inline constexpr std::uint64_t kRound = 0x726f756eULL;      // "roun"
inline constexpr std::uint64_t kChannel = 0x6368616eULL;    // "chan"
inline constexpr std::uint64_t kNoise = 0x6e6f6973ULL;      // "nois"
inline constexpr std::uint64_t kBatch = 0x62617463ULL;      // "batc"
inline constexpr std::uint64_t kSampling = 0x73616d70ULL;   // "samp"
}  // namespace stream

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random stream. The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); all distributions are implemented here
// rather than via <random> adapters, whose mappings are implementation
// defined, so replays are bit-identical across standard libraries.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key), engine_(splitmix64(key)) {}

  // Derives an independent child stream; does not consume from this stream.
  RngStream child(std::uint64_t tag) const {
    return RngStream(splitmix64(key_ ^ splitmix64(tag)));
  }
  RngStream child(std::uint64_t tag, std::uint64_t index) const {
    return child(tag).child(index + 1);
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (second variate cached).
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = (static_cast<double>(bits() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

  // One draw from CN(0, variance): real and imaginary parts are independent
  // N(0, variance / 2).
  Complex cnormal(double variance) {
    const double scale = std::sqrt(variance / 2.0);
    const double re = scale * normal();
    const double im = scale * normal();
    return {re, im};
  }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw = bits();
    while (draw >= limit) draw = bits();
    return draw % n;
  }

  // First k entries of a uniform permutation of {0, ..., n-1}
  // (partial Fisher-Yates), returned sorted.
  std::vector<Index> sample_without_replacement(Index n, Index k);

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

inline std::vector<Index> RngStream::sample_without_replacement(Index n,
                                                                Index k) {
  if (k < 0 || k > n) throw ParameterError("sample size out of range");
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < k; ++i) {
    const auto j =
        i + static_cast<Index>(below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)],
              pool[static_cast<std::size_t>(j)]);
  }
  std::vector<Index> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace airfl
