#include <atomic>
#include <cstdlib>
#include <string_view>

#include "kinuq/simd/kernels.hpp"

namespace kinuq::simd {
namespace {

const KernelTable* initial_table() noexcept {
  const bool has_avx2 = avx2_supported();
  if (const char* env = std::getenv("KINUQ_SIMD")) {
    const std::string_view v(env);
    if (v == "scalar") return &scalar_kernels();
    if (v == "avx2" && has_avx2) return &avx2_kernels();
  }
  return has_avx2 ? &avx2_kernels() : &scalar_kernels();
}

std::atomic<const KernelTable*>& active() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

#ifndef KINUQ_HAVE_AVX2
const KernelTable& avx2_kernels() noexcept { return scalar_kernels(); }
#endif

bool avx2_supported() noexcept {
#if defined(KINUQ_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& kernels() noexcept { return *active().load(std::memory_order_acquire); }

Isa select_isa(Isa isa) noexcept {
  const KernelTable* t = &scalar_kernels();
  if (isa == Isa::Avx2 && avx2_supported()) t = &avx2_kernels();
  active().store(t, std::memory_order_release);
  return t->isa;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace kinuq::simd
