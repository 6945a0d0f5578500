// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_RANDOM_HPP
#define SPM_RANDOM_HPP

#include <array>
#include <cstdint>

namespace spm {

/// Deterministic, splittable random source. The same seed always yields the
/// same stream, and substreams obtained through split() are statistically
/// independent of their parent and of each other. Distribution helpers are
/// implemented locally so streams are reproducible across standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  /// Derives an independent substream. split(a) != split(b) for a != b, and
  /// neither interferes with the parent stream.
  RandomSource split(std::uint64_t stream) const;

  std::uint64_t next_u64();

  /// Uniform integer in [0, n), n >= 1. Unbiased (Lemire rejection).
  std::uint64_t uniform_below(std::uint64_t n);

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in [0, 1).
  double uniform_real();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_ = 0;  // derivation key, preserved for split()
  std::array<std::uint64_t, 4> state_{};  // xoshiro256**
};

}  // namespace spm

#endif  // SPM_RANDOM_HPP
