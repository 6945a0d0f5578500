// SPDX-License-Identifier: Apache-2.0

#include "spm/random.hpp"

namespace spm {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed) {
  std::uint64_t s = seed;
  for (auto& w : state_) w = splitmix64(s);
}

RandomSource RandomSource::split(std::uint64_t stream) const {
  // Mix the stream id into the derivation key before expanding, so sibling
  // substreams and the parent never share xoshiro states.
  std::uint64_t key = seed_ ^ 0xa0761d6478bd642fULL;
  key = (key ^ (key >> 32)) * 0xe7037ed1a0b428dbULL;
  key ^= stream + 0x8ebc6af09c88c6e3ULL;
  return RandomSource(splitmix64(key));
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

std::uint64_t RandomSource::uniform_below(std::uint64_t n) {
  if (n <= 1) return 0;
  using u128 = unsigned __int128;
  std::uint64_t x = next_u64();
  u128 m = static_cast<u128>(x) * n;
  auto lo = static_cast<std::uint64_t>(m);
  if (lo < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (lo < threshold) {
      x = next_u64();
      m = static_cast<u128>(x) * n;
      lo = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t RandomSource::uniform_int(std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(uniform_below(span));
}

double RandomSource::uniform_real() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

}  // namespace spm
