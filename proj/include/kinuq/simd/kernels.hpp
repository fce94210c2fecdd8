#pragma once

// Data-parallel inner loops of the solvers. Every kernel has a portable scalar
// reference and an AVX2 variant; the active table is picked once at runtime.
//
// All variants evaluate the same expression tree in the same order (no FMA
// contraction, reductions over four interleaved partial sums), so results are
// bitwise identical across ISAs. tests/unit/test_simd.cpp enforces this.

#include <cstddef>
#include <string_view>

namespace kinuq::simd {

enum class Isa { Scalar, Avx2 };

struct Sums3 {
  double s0 = 0.0;  // sum f
  double s1 = 0.0;  // sum v1 f
  double s2 = 0.0;  // sum v2 f
};

struct KernelTable {
  Isa isa;

  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);

  // acc[i] += w * (a[i] * b[i])
  void (*accumulate_product)(double w, const double* a, const double* b, double* acc,
                             std::size_t n);

  // Limited second-order upwind face flux between cells 0 and 1 for every
  // velocity node; speed is v1 per node, courant = speed * dt / dx.
  void (*muscl_flux)(const double* fm1, const double* f0, const double* fp1, const double* fp2,
                     const double* speed, const double* courant, double* flux, std::size_t n);

  // out[i] = f[i] - lambda * (flux_right[i] - flux_left[i])
  void (*flux_update)(const double* f, const double* flux_left, const double* flux_right,
                      double lambda, double* out, std::size_t n);

  // out = (fstar + a (q - beta m_old + beta f_old) + a beta m_new) / (1 + a beta)
  void (*imex_combine)(const double* fstar, const double* q, const double* m_old,
                       const double* f_old, const double* m_new, double a, double beta,
                       double* out, std::size_t n);

  // sum |a - b|
  double (*abs_diff_sum)(const double* a, const double* b, std::size_t n);

  Sums3 (*first_moments)(const double* f, const double* v1, const double* v2, std::size_t n);

  // sum ((v1 - u1)^2 + (v2 - u2)^2) f
  double (*centered_energy)(const double* f, const double* v1, const double* v2, double u1,
                            double u2, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
// Only valid when avx2_supported() is true.
const KernelTable& avx2_kernels() noexcept;

bool avx2_supported() noexcept;

// Active table. Defaults to the widest supported ISA; the KINUQ_SIMD
// environment variable ("scalar" or "avx2") overrides the choice.
const KernelTable& kernels() noexcept;

// Forces the active ISA (tests, benchmarks). Falls back to scalar when the
// requested ISA is unsupported; returns the ISA actually selected.
Isa select_isa(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

}  // namespace kinuq::simd
