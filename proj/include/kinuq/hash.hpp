#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>
#include <type_traits>

namespace kinuq {

// 64-bit FNV-1a, used for content addressing (kernel cache, reference cache,
// manifest hashes). Not cryptographic.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }

  template <class T>
    requires std::is_trivially_copyable_v<T>
  Fnv1a& add(const T& v) noexcept {
    bytes(&v, sizeof(T));
    return *this;
  }

  Fnv1a& add(std::string_view s) noexcept {
    add(s.size());
    bytes(s.data(), s.size());
    return *this;
  }

  std::uint64_t value() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

}  // namespace kinuq
