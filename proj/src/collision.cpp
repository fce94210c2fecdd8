#include "kinuq/collision.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>

#include "kinuq/error.hpp"
#include "kinuq/hash.hpp"
#include "kinuq/simd/kernels.hpp"

namespace kinuq {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Gauss-Legendre nodes/weights on [0, len].
void gauss_legendre(int n, double len, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    const std::size_t k = static_cast<std::size_t>(i);
    x[k] = 0.5 * len * (1.0 - z);
    w[k] = len / ((1.0 - z * z) * dp * dp);
  }
}

int signed_mode(int k, int n) { return k < n / 2 ? k : k - n; }

bool is_nyquist(int k1, int k2, int n) { return k1 == n / 2 || k2 == n / 2; }

// integral_{-R}^{R} cos(xi r a) dr
double sinc_factor(double xi, double radius, double a) {
  const double t = xi * a;
  if (std::fabs(t * radius) < 1e-8) return 2.0 * radius;
  return 2.0 * std::sin(t * radius) / t;
}

// 2 integral_0^R (r0^2 + s^2)^(gamma/2) cos(xi s c) ds, composite Gauss-Legendre.
double weighted_cos_integral(double r0, double gamma, double xi, double radius, double c,
                             const std::vector<double>& gx, const std::vector<double>& gw,
                             int panels) {
  const double h = radius / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double s = a + gx[q] * (h / radius);
      sum += gw[q] * (h / radius) * std::pow(r0 * r0 + s * s, 0.5 * gamma) * std::cos(xi * s * c);
    }
  }
  return 2.0 * sum;
}

}  // namespace

void CollisionParams::validate() const {
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorKind::Config, "collision b must be > 0");
  if (!(gamma > -2.0 && gamma <= 1.0)) {
    throw Error(ErrorKind::Config, "collision gamma must lie in (-2, 1]");
  }
  if (n_angular < 2 || n_radial < 2) {
    throw Error(ErrorKind::Config, "collision quadrature counts must be >= 2");
  }
  if (!(beta0 > 0.0)) throw Error(ErrorKind::Config, "penalty beta0 must be > 0");
}

double default_r_support(double l_max) { return 2.0 * l_max / (3.0 + std::numbers::sqrt2); }

SpectralKernel::SpectralKernel(const CollisionParams& p, const VelocityGrid& vg)
    : params_(p), grid_(vg) {
  p.validate();
  const int n = vg.n();
  if (n > kMaxSpectralModes) {
    throw Error(ErrorKind::Capacity, "spectral kernel for n_per_dim=" + std::to_string(n) +
                                         " exceeds the " + std::to_string(kMaxSpectralModes) +
                                         " mode limit");
  }
  const double support = p.r_support > 0.0 ? p.r_support : default_r_support(vg.l_max());
  radius_ = 2.0 * support;
  xi_ = std::numbers::pi / vg.l_max();
  const int m_ang = p.n_angular;
  const std::size_t nn = static_cast<std::size_t>(n) * n;

  auto make_basis = [&](auto&& value_of_projection, double e1, double e2) {
    std::vector<double> basis(nn, 0.0);
    for (int k1 = 0; k1 < n; ++k1) {
      for (int k2 = 0; k2 < n; ++k2) {
        if (is_nyquist(k1, k2, n)) continue;
        const double a = signed_mode(k1, n) * e1 + signed_mode(k2, n) * e2;
        basis[static_cast<std::size_t>(k1) * n + k2] = value_of_projection(a);
      }
    }
    return basis;
  };

  if (p.gamma == 0.0) {
    auto phi = [&](double a) { return sinc_factor(xi_, radius_, a); };
    for (int j = 0; j < m_ang; ++j) {
      const double th = j * std::numbers::pi / m_ang;
      bases_.push_back(make_basis(phi, std::cos(th), std::sin(th)));
    }
    const bool paired = m_ang % 2 == 0;
    if (!paired) {
      for (int j = 0; j < m_ang; ++j) {
        const double th = j * std::numbers::pi / m_ang;
        bases_.push_back(make_basis(phi, -std::sin(th), std::cos(th)));
      }
    }
    for (int j = 0; j < m_ang; ++j) {
      const std::size_t ju = static_cast<std::size_t>(j);
      const std::size_t perp = paired ? static_cast<std::size_t>((j + m_ang / 2) % m_ang)
                                      : static_cast<std::size_t>(m_ang + j);
      terms_.push_back({ju, perp, p.b / m_ang});
    }
  } else {
    std::vector<double> rq;
    std::vector<double> wq;
    gauss_legendre(p.n_radial, radius_, rq, wq);
    std::vector<double> gx;
    std::vector<double> gw;
    gauss_legendre(8, radius_, gx, gw);
    for (int j = 0; j < m_ang; ++j) {
      const double th = j * std::numbers::pi / m_ang;
      const double c = std::cos(th);
      const double s = std::sin(th);
      for (int q = 0; q < p.n_radial; ++q) {
        const double r0 = rq[static_cast<std::size_t>(q)];
        const std::size_t phi_idx = bases_.size();
        bases_.push_back(make_basis([&](double a) { return std::cos(xi_ * r0 * a); }, c, s));
        const std::size_t psi_idx = bases_.size();
        bases_.push_back(make_basis(
            [&](double a) {
              return weighted_cos_integral(r0, p.gamma, xi_, radius_, a, gx, gw, 32);
            },
            -s, c));
        terms_.push_back({phi_idx, psi_idx, 2.0 * p.b * wq[static_cast<std::size_t>(q)] / m_ang});
      }
    }
  }

  loss_.assign(nn, 0.0);
  for (const Term& t : terms_) {
    const auto& bp = bases_[t.phi];
    const auto& bq = bases_[t.psi];
    for (std::size_t k = 0; k < nn; ++k) loss_[k] += t.weight * (bp[k] * bq[k]);
  }
  for (double v : loss_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::NumericBreakdown, "non-finite kernel weight");
  }

  Fnv1a h;
  h.add(p.b).add(p.gamma).add(p.n_angular).add(p.n_radial).add(support).add(n).add(vg.l_max());
  hash_ = h.value();
}

double SpectralKernel::pair_weight(int l1, int l2, int m1, int m2) const {
  const int n = grid_.n();
  auto idx = [n](int a, int b) {
    return static_cast<std::size_t>((a % n + n) % n) * n + static_cast<std::size_t>((b % n + n) % n);
  };
  const std::size_t li = idx(l1, l2);
  const std::size_t mi = idx(m1, m2);
  double s = 0.0;
  for (const Term& t : terms_) s += t.weight * (bases_[t.phi][li] * bases_[t.psi][mi]);
  return s;
}

SpectralKernel build_kernel(const CollisionParams& p, const VelocityGrid& vg) {
  return SpectralKernel(p, vg);
}

std::shared_ptr<const SpectralKernel> cached_kernel(const CollisionParams& p,
                                                    const VelocityGrid& vg) {
  static std::mutex mu;
  static std::unordered_multimap<std::uint64_t, std::shared_ptr<const SpectralKernel>> cache;
  Fnv1a h;
  const double support = p.r_support > 0.0 ? p.r_support : default_r_support(vg.l_max());
  h.add(p.b).add(p.gamma).add(p.n_angular).add(p.n_radial).add(support).add(vg.n()).add(
      vg.l_max());
  const std::uint64_t key = h.value();
  {
    std::lock_guard lock(mu);
    auto [lo, hi] = cache.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
      const auto& k = *it->second;
      if (k.grid() == vg && k.params().b == p.b && k.params().gamma == p.gamma &&
          k.params().n_angular == p.n_angular && k.params().n_radial == p.n_radial &&
          k.radius() == 2.0 * support) {
        return it->second;
      }
    }
  }
  auto built = std::make_shared<const SpectralKernel>(p, vg);
  std::lock_guard lock(mu);
  cache.emplace(key, built);
  return built;
}

namespace {

class FftWorkspace {
 public:
  explicit FftWorkspace(int n) : n_(n) {
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    const std::size_t nh = static_cast<std::size_t>(n) * (n / 2 + 1);
    real_ = fftw_alloc_real(nn);
    spec_ = fftw_alloc_complex(nh);
    tmp_ = fftw_alloc_complex(nh);
    std::lock_guard lock(planner_mutex());
    r2c_ = fftw_plan_dft_r2c_2d(n, n, real_, spec_, FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r_2d(n, n, tmp_, real_, FFTW_ESTIMATE);
  }
  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;
  ~FftWorkspace() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
    fftw_free(real_);
    fftw_free(spec_);
    fftw_free(tmp_);
  }

  int n() const { return n_; }
  std::size_t half() const { return static_cast<std::size_t>(n_) * (n_ / 2 + 1); }

  void forward(std::span<const double> f) {
    std::copy(f.begin(), f.end(), real_);
    fftw_execute(r2c_);
  }

  // out = c2r(mult . spec), mult given over the full N x N mode table.
  void filtered_inverse(std::span<const double> mult, double* out) {
    const int nh = n_ / 2 + 1;
    for (int k1 = 0; k1 < n_; ++k1) {
      const double* mrow = mult.data() + static_cast<std::size_t>(k1) * n_;
      const std::size_t base = static_cast<std::size_t>(k1) * nh;
      for (int k2 = 0; k2 < nh; ++k2) {
        tmp_[base + k2][0] = mrow[k2] * spec_[base + k2][0];
        tmp_[base + k2][1] = mrow[k2] * spec_[base + k2][1];
      }
    }
    fftw_execute(c2r_);
    std::copy(real_, real_ + static_cast<std::size_t>(n_) * n_, out);
  }

  std::vector<double>& field(std::size_t j, std::size_t nn) {
    if (fields_.size() <= j) fields_.resize(j + 1);
    fields_[j].resize(nn);
    return fields_[j];
  }

 private:
  int n_;
  double* real_;
  fftw_complex* spec_;
  fftw_complex* tmp_;
  fftw_plan r2c_;
  fftw_plan c2r_;
  std::vector<std::vector<double>> fields_;
};

FftWorkspace& workspace(int n) {
  thread_local std::map<int, std::unique_ptr<FftWorkspace>> spaces;
  auto& slot = spaces[n];
  if (!slot) slot = std::make_unique<FftWorkspace>(n);
  return *slot;
}

}  // namespace

void q_spectral(std::span<const double> f, const SpectralKernel& k, std::span<double> out,
                int cell) {
  const std::size_t nn = k.grid().size();
  if (f.size() != nn || out.size() != nn) {
    throw Error(ErrorKind::Shape, "q_spectral slice size does not match the kernel grid");
  }
  const auto& simd = simd::kernels();
  FftWorkspace& ws = workspace(k.n());
  ws.forward(f);

  const double n2 = static_cast<double>(nn);
  for (std::size_t j = 0; j < k.n_bases(); ++j) ws.filtered_inverse(k.basis(j), ws.field(j, nn).data());

  std::vector<double>& conv = ws.field(k.n_bases(), nn);
  ws.filtered_inverse(k.loss(), conv.data());
  // loss: f * conv / N^2 ; stored negated so the gain accumulates on top.
  for (std::size_t i = 0; i < nn; ++i) out[i] = -(f[i] * (conv[i] / n2));

  const double inv_n4 = 1.0 / (n2 * n2);
  for (const auto& t : k.terms()) {
    simd.accumulate_product(t.weight * inv_n4, ws.field(t.phi, nn).data(),
                            ws.field(t.psi, nn).data(), out.data(), nn);
  }
  for (std::size_t i = 0; i < nn; ++i) {
    if (!std::isfinite(out[i])) {
      throw Error(ErrorKind::NumericBreakdown,
                  "non-finite collision term in cell " + std::to_string(cell));
    }
  }
}

std::vector<double> q_spectral(std::span<const double> f, const SpectralKernel& k) {
  std::vector<double> out(f.size());
  q_spectral(f, k, out);
  return out;
}

std::vector<double> q_naive(std::span<const double> f, const SpectralKernel& k) {
  const int n = k.n();
  if (n > kMaxNaiveModes) {
    throw Error(ErrorKind::OracleSize,
                "q_naive refuses n_per_dim=" + std::to_string(n) + " (limit " +
                    std::to_string(kMaxNaiveModes) + ")");
  }
  const std::size_t nn = static_cast<std::size_t>(n) * n;
  if (f.size() != nn) throw Error(ErrorKind::Shape, "q_naive slice size mismatch");
  using cplx = std::complex<double>;
  std::vector<cplx> tw(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    tw[static_cast<std::size_t>(t)] = std::polar(1.0, 2.0 * std::numbers::pi * t / n);
  }
  auto at = [n](int a, int b) { return static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b); };

  // fhat_k = (1/N^2) sum_j f_j exp(-2 pi i k.j / N)
  std::vector<cplx> fh(nn);
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      cplx s = 0.0;
      for (int j1 = 0; j1 < n; ++j1) {
        for (int j2 = 0; j2 < n; ++j2) {
          s += f[at(j1, j2)] * std::conj(tw[static_cast<std::size_t>((k1 * j1 + k2 * j2) % n)]);
        }
      }
      fh[at(k1, k2)] = s / static_cast<double>(nn);
    }
  }

  // Qhat_k = sum_{l + m = k (mod N)} fhat_l fhat_m (beta(l, m) - L(m))
  const auto terms = k.terms();
  const auto loss = k.loss();
  std::vector<cplx> qh(nn, 0.0);
  for (int l1 = 0; l1 < n; ++l1) {
    for (int l2 = 0; l2 < n; ++l2) {
      const std::size_t li = at(l1, l2);
      for (int m1 = 0; m1 < n; ++m1) {
        for (int m2 = 0; m2 < n; ++m2) {
          const std::size_t mi = at(m1, m2);
          double beta = 0.0;
          for (const auto& t : terms) beta += t.weight * k.basis(t.phi)[li] * k.basis(t.psi)[mi];
          qh[at((l1 + m1) % n, (l2 + m2) % n)] += fh[li] * fh[mi] * (beta - loss[mi]);
        }
      }
    }
  }

  std::vector<double> out(nn);
  for (int j1 = 0; j1 < n; ++j1) {
    for (int j2 = 0; j2 < n; ++j2) {
      cplx s = 0.0;
      for (int k1 = 0; k1 < n; ++k1) {
        for (int k2 = 0; k2 < n; ++k2) {
          s += qh[at(k1, k2)] * tw[static_cast<std::size_t>((k1 * j1 + k2 * j2) % n)];
        }
      }
      out[at(j1, j2)] = s.real();
    }
  }
  return out;
}

void bgk_relax(std::span<const double> f, std::span<const double> m_eq, double beta,
               std::span<double> out) {
  if (f.size() != m_eq.size() || f.size() != out.size()) {
    throw Error(ErrorKind::Shape, "bgk_relax slice size mismatch");
  }
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = beta * (m_eq[i] - f[i]);
}

std::vector<double> bgk_relax(std::span<const double> f, std::span<const double> m_eq,
                              double beta) {
  std::vector<double> out(f.size());
  bgk_relax(f, m_eq, beta, out);
  return out;
}

double penalty_beta_cell(const CellMoments& m, const CollisionParams& p) {
  return p.beta0 * p.b * m.rho * std::pow(m.temp, 0.5 * p.gamma);
}

std::vector<double> penalty_beta(const MacroState& m, const CollisionParams& p) {
  std::vector<double> beta(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) beta[i] = penalty_beta_cell(m.cell(i), p);
  return beta;
}

}  // namespace kinuq
