#pragma once

// Boltzmann collision operator for the 2D VHS kernel B = b |g|^gamma,
// evaluated with the fast Fourier spectral method (Carleman form, angular x
// radial product quadrature) on the periodized velocity grid, plus the BGK
// penalization pieces used by the AP time stepper.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "kinuq/phase_space.hpp"

namespace kinuq {

struct CollisionParams {
  double b = 1.0;
  double gamma = 0.0;
  int n_angular = 8;
  int n_radial = 8;
  // Velocity support radius S of the anti-aliasing condition; <= 0 selects
  // the default 2 l_max / (3 + sqrt 2). The Carleman truncation is R = 2 S.
  double r_support = 0.0;
  // Penalty scale in beta = beta0 b rho T^(gamma/2).
  double beta0 = 2.0;

  void validate() const;
  bool operator==(const CollisionParams&) const = default;
};

double default_r_support(double l_max);

/// Precomputed spectral multipliers. Gain: sum_t w_t phi_t(l) psi_t(m) over
/// mode pairs (l, m); loss: L(m) = sum_t w_t phi_t(m) psi_t(m). Basis arrays
/// depend only on the geometry; the term weights carry b.
class SpectralKernel {
 public:
  struct Term {
    std::size_t phi;
    std::size_t psi;
    double weight;
  };

  SpectralKernel(const CollisionParams& p, const VelocityGrid& vg);

  const CollisionParams& params() const noexcept { return params_; }
  const VelocityGrid& grid() const noexcept { return grid_; }
  int n() const noexcept { return grid_.n(); }
  double radius() const noexcept { return radius_; }
  double xi() const noexcept { return xi_; }

  // Basis j over all N x N modes in FFT index order (k1 * N + k2); the
  // Nyquist row and column are zero.
  std::size_t n_bases() const noexcept { return bases_.size(); }
  std::span<const double> basis(std::size_t j) const noexcept { return bases_[j]; }
  std::span<const Term> terms() const noexcept { return terms_; }
  std::span<const double> loss() const noexcept { return loss_; }

  // Gain multiplier for the signed mode pair (l, m).
  double pair_weight(int l1, int l2, int m1, int m2) const;

  std::uint64_t content_hash() const noexcept { return hash_; }

 private:
  CollisionParams params_;
  VelocityGrid grid_;
  double radius_;
  double xi_;
  std::vector<std::vector<double>> bases_;
  std::vector<Term> terms_;
  std::vector<double> loss_;
  std::uint64_t hash_;
};

inline constexpr int kMaxSpectralModes = 128;
inline constexpr int kMaxNaiveModes = 16;

SpectralKernel build_kernel(const CollisionParams& p, const VelocityGrid& vg);

// Process-wide cache keyed by the content hash of (params, grid).
std::shared_ptr<const SpectralKernel> cached_kernel(const CollisionParams& p,
                                                    const VelocityGrid& vg);

/// Q(f, f) for one velocity slice. cell only labels error messages.
void q_spectral(std::span<const double> f, const SpectralKernel& k, std::span<double> out,
                int cell = -1);
std::vector<double> q_spectral(std::span<const double> f, const SpectralKernel& k);

// Same truncated spectral sum by direct DFTs and mode-pair loops (no FFT).
std::vector<double> q_naive(std::span<const double> f, const SpectralKernel& k);

// beta (M - f)
void bgk_relax(std::span<const double> f, std::span<const double> m_eq, double beta,
               std::span<double> out);
std::vector<double> bgk_relax(std::span<const double> f, std::span<const double> m_eq,
                              double beta);

double penalty_beta_cell(const CellMoments& m, const CollisionParams& p);
std::vector<double> penalty_beta(const MacroState& m, const CollisionParams& p);

}  // namespace kinuq
