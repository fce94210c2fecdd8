// Compiled with -mavx2. Nothing here may run unless avx2_supported().
#include <immintrin.h>

#include <cmath>

#include "kinuq/simd/kernels.hpp"

namespace kinuq::simd {
namespace {

inline __m256d vabs(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline __m256d vminmod(__m256d a, __m256d b) {
  const __m256d pos = _mm256_cmp_pd(_mm256_mul_pd(a, b), _mm256_setzero_pd(), _CMP_GT_OQ);
  const __m256d a_smaller = _mm256_cmp_pd(vabs(a), vabs(b), _CMP_LT_OQ);
  return _mm256_and_pd(_mm256_blendv_pd(b, a, a_smaller), pos);
}

inline double hsum(__m256d v) {
  alignas(32) double l[4];
  _mm256_store_pd(l, v);
  return (l[0] + l[1]) + (l[2] + l[3]);
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void accumulate_product(double w, const double* a, const double* b, double* acc,
                        std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(vw, p)));
  }
  for (; i < n; ++i) acc[i] = acc[i] + w * (a[i] * b[i]);
}

void muscl_flux(const double* fm1, const double* f0, const double* fp1, const double* fp2,
                const double* speed, const double* courant, double* flux, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d c = _mm256_loadu_pd(speed + i);
    const __m256d nu = _mm256_loadu_pd(courant + i);
    const __m256d a = _mm256_loadu_pd(fm1 + i);
    const __m256d b = _mm256_loadu_pd(f0 + i);
    const __m256d d = _mm256_loadu_pd(fp1 + i);
    const __m256d e = _mm256_loadu_pd(fp2 + i);

    const __m256d s_pos = vminmod(_mm256_sub_pd(b, a), _mm256_sub_pd(d, b));
    const __m256d f_pos = _mm256_mul_pd(
        c, _mm256_add_pd(b, _mm256_mul_pd(half, _mm256_mul_pd(_mm256_sub_pd(one, nu), s_pos))));

    const __m256d s_neg = vminmod(_mm256_sub_pd(d, b), _mm256_sub_pd(e, d));
    const __m256d f_neg = _mm256_mul_pd(
        c, _mm256_sub_pd(d, _mm256_mul_pd(half, _mm256_mul_pd(_mm256_add_pd(one, nu), s_neg))));

    const __m256d right_moving = _mm256_cmp_pd(c, _mm256_setzero_pd(), _CMP_GT_OQ);
    _mm256_storeu_pd(flux + i, _mm256_blendv_pd(f_neg, f_pos, right_moving));
  }
  if (i < n) scalar_kernels().muscl_flux(fm1 + i, f0 + i, fp1 + i, fp2 + i, speed + i,
                                         courant + i, flux + i, n - i);
}

void flux_update(const double* f, const double* fl, const double* fr, double lambda,
                 double* out, std::size_t n) {
  const __m256d vl = _mm256_set1_pd(lambda);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(fr + i), _mm256_loadu_pd(fl + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(f + i), _mm256_mul_pd(vl, diff)));
  }
  for (; i < n; ++i) out[i] = f[i] - lambda * (fr[i] - fl[i]);
}

void imex_combine(const double* fstar, const double* q, const double* m_old, const double* f_old,
                  const double* m_new, double a, double beta, double* out, std::size_t n) {
  const double ab = a * beta;
  const double denom = 1.0 + ab;
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(beta);
  const __m256d vab = _mm256_set1_pd(ab);
  const __m256d vden = _mm256_set1_pd(denom);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d inner =
        _mm256_add_pd(_mm256_sub_pd(_mm256_loadu_pd(q + i), _mm256_mul_pd(vb, _mm256_loadu_pd(m_old + i))),
                      _mm256_mul_pd(vb, _mm256_loadu_pd(f_old + i)));
    const __m256d num =
        _mm256_add_pd(_mm256_add_pd(_mm256_loadu_pd(fstar + i), _mm256_mul_pd(va, inner)),
                      _mm256_mul_pd(vab, _mm256_loadu_pd(m_new + i)));
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, vden));
  }
  for (; i < n; ++i) {
    const double inner = (q[i] - beta * m_old[i]) + beta * f_old[i];
    const double num = (fstar[i] + a * inner) + ab * m_new[i];
    out[i] = num / denom;
  }
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s = s + std::fabs(a[i] - b[i]);
  return s;
}

Sums3 first_moments(const double* f, const double* v1, const double* v2, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(f + i);
    a0 = _mm256_add_pd(a0, x);
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(_mm256_loadu_pd(v1 + i), x));
    a2 = _mm256_add_pd(a2, _mm256_mul_pd(_mm256_loadu_pd(v2 + i), x));
  }
  Sums3 s{hsum(a0), hsum(a1), hsum(a2)};
  for (; i < n; ++i) {
    s.s0 = s.s0 + f[i];
    s.s1 = s.s1 + v1[i] * f[i];
    s.s2 = s.s2 + v2[i] * f[i];
  }
  return s;
}

double centered_energy(const double* f, const double* v1, const double* v2, double u1, double u2,
                       std::size_t n) {
  const __m256d vu1 = _mm256_set1_pd(u1);
  const __m256d vu2 = _mm256_set1_pd(u2);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(v1 + i), vu1);
    const __m256d d2 = _mm256_sub_pd(_mm256_loadu_pd(v2 + i), vu2);
    const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(d1, d1), _mm256_mul_pd(d2, d2));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(r2, _mm256_loadu_pd(f + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d1 = v1[i] - u1;
    const double d2 = v2[i] - u2;
    s = s + (d1 * d1 + d2 * d2) * f[i];
  }
  return s;
}

constexpr KernelTable kAvx2{
    Isa::Avx2,    mul,           accumulate_product, muscl_flux, flux_update, imex_combine,
    abs_diff_sum, first_moments, centered_energy,
};

}  // namespace

const KernelTable& avx2_kernels() noexcept { return kAvx2; }

}  // namespace kinuq::simd
