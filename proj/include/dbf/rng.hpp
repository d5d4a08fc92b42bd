// Copyright 2026 The dbf Authors
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

// Counter-based random streams.
//
// A stream is a 64-bit key plus a 64-bit counter; each draw hashes
// key + counter * gamma with the SplitMix64 finalizer. Substreams are
// derived by hashing the parent key with an index, so the draws of
// substream i never depend on how many siblings exist or in which order
// they are consumed.

#ifndef DBF_RNG_HPP_
#define DBF_RNG_HPP_

#include <cstdint>
#include <limits>

namespace dbf {

namespace detail {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr CounterRng() = default;
  constexpr explicit CounterRng(std::uint64_t seed) : key_(detail::mix64(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGoldenGamma);
  }

  // Uniform double in [0, 1) with 53 random bits; bit-identical on every
  // platform, unlike std::uniform_real_distribution.
  constexpr double uniform01() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Independent child stream. Does not advance this stream.
  constexpr CounterRng split(std::uint64_t index) const {
    CounterRng child;
    child.key_ = detail::mix64(detail::mix64(key_ ^ 0x6A09E667F3BCC909ULL) +
                               (index + 1) * detail::kGoldenGamma);
    return child;
  }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t counter() const { return counter_; }

  friend constexpr bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace dbf

#endif  // DBF_RNG_HPP_
