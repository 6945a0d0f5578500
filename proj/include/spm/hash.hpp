// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_HASH_HPP
#define SPM_HASH_HPP

#include <cstddef>
#include <cstdint>
#include <string>

namespace spm {

/// 64-bit FNV-1a, used for content keys on cached artifacts.
class ContentHash {
 public:
  ContentHash& update(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
    return *this;
  }

  template <typename T>
  ContentHash& update_value(const T& v) {
    return update(&v, sizeof(T));
  }

  ContentHash& update_string(const std::string& s) {
    update(s.data(), s.size());
    return update_value(s.size());
  }

  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace spm

#endif  // SPM_HASH_HPP
