#include <cmath>

#include "kinuq/simd/kernels.hpp"

namespace kinuq::simd {
namespace {

inline double minmod(double a, double b) {
  if (a * b > 0.0) return std::fabs(a) < std::fabs(b) ? a : b;
  return 0.0;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void accumulate_product(double w, const double* a, const double* b, double* acc,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + w * (a[i] * b[i]);
}

void muscl_flux(const double* fm1, const double* f0, const double* fp1, const double* fp2,
                const double* speed, const double* courant, double* flux, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double c = speed[i];
    const double nu = courant[i];
    if (c > 0.0) {
      const double s = minmod(f0[i] - fm1[i], fp1[i] - f0[i]);
      flux[i] = c * (f0[i] + 0.5 * ((1.0 - nu) * s));
    } else {
      const double s = minmod(fp1[i] - f0[i], fp2[i] - fp1[i]);
      flux[i] = c * (fp1[i] - 0.5 * ((1.0 + nu) * s));
    }
  }
}

void flux_update(const double* f, const double* fl, const double* fr, double lambda,
                 double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = f[i] - lambda * (fr[i] - fl[i]);
}

void imex_combine(const double* fstar, const double* q, const double* m_old, const double* f_old,
                  const double* m_new, double a, double beta, double* out, std::size_t n) {
  const double ab = a * beta;
  const double denom = 1.0 + ab;
  for (std::size_t i = 0; i < n; ++i) {
    const double inner = (q[i] - beta * m_old[i]) + beta * f_old[i];
    const double num = (fstar[i] + a * inner) + ab * m_new[i];
    out[i] = num / denom;
  }
}

double abs_diff_sum(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] = acc[l] + std::fabs(a[i + l] - b[i + l]);
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) s = s + std::fabs(a[i] - b[i]);
  return s;
}

Sums3 first_moments(const double* f, const double* v1, const double* v2, std::size_t n) {
  double a0[4] = {0.0, 0.0, 0.0, 0.0};
  double a1[4] = {0.0, 0.0, 0.0, 0.0};
  double a2[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double x = f[i + l];
      a0[l] = a0[l] + x;
      a1[l] = a1[l] + v1[i + l] * x;
      a2[l] = a2[l] + v2[i + l] * x;
    }
  }
  Sums3 s{(a0[0] + a0[1]) + (a0[2] + a0[3]), (a1[0] + a1[1]) + (a1[2] + a1[3]),
          (a2[0] + a2[1]) + (a2[2] + a2[3])};
  for (; i < n; ++i) {
    s.s0 = s.s0 + f[i];
    s.s1 = s.s1 + v1[i] * f[i];
    s.s2 = s.s2 + v2[i] * f[i];
  }
  return s;
}

double centered_energy(const double* f, const double* v1, const double* v2, double u1, double u2,
                       std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double d1 = v1[i + l] - u1;
      const double d2 = v2[i + l] - u2;
      acc[l] = acc[l] + (d1 * d1 + d2 * d2) * f[i + l];
    }
  }
  double s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < n; ++i) {
    const double d1 = v1[i] - u1;
    const double d2 = v2[i] - u2;
    s = s + (d1 * d1 + d2 * d2) * f[i];
  }
  return s;
}

constexpr KernelTable kScalar{
    Isa::Scalar,  mul,          accumulate_product, muscl_flux, flux_update, imex_combine,
    abs_diff_sum, first_moments, centered_energy,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace kinuq::simd
