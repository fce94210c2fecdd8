#include "kinuq/kinetic_solver.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "kinuq/error.hpp"
#include "kinuq/simd/kernels.hpp"

namespace kinuq {

double max_stable_dt(const VelocityGrid& vg, const SpatialGrid& sg) {
  return sg.dx() / vg.l_max();
}

namespace {

void check_cfl(double dt, const VelocityGrid& vg, const SpatialGrid& sg) {
  const double dt_max = max_stable_dt(vg, sg);
  if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "dt=%.6g violates the advective CFL bound dt_max=%.6g", dt,
                  dt_max);
    throw Error(ErrorKind::Stability, buf);
  }
}

bool is_active(std::span<const std::uint8_t> active, int i) {
  return active.empty() || active[static_cast<std::size_t>(i)] != 0;
}

// Velocity slices for cell indices -2 .. n+1, with boundary ghosts.
class HaloView {
 public:
  explicit HaloView(const DistributionField& f) : f_(f) {
    const int n = f.n_cells();
    if (f.spatial().boundary() == Boundary::Specular) {
      const VelocityGrid& vg = f.velocity();
      const int nv = vg.n();
      const std::size_t cs = f.cell_size();
      // ghosts -1, -2 mirror cells 0, 1; ghosts n, n+1 mirror n-1, n-2.
      const int src[4] = {1, 0, n - 1, n - 2};
      for (int g = 0; g < 4; ++g) {
        mirrored_[g].resize(cs);
        const auto s = f.cell(src[g]);
        for (int i1 = 0; i1 < nv; ++i1) {
          const std::size_t from = static_cast<std::size_t>(vg.mirror_index(i1)) * nv;
          const std::size_t to = static_cast<std::size_t>(i1) * nv;
          for (int i2 = 0; i2 < nv; ++i2) mirrored_[g][to + i2] = s[from + i2];
        }
      }
    }
  }

  const double* operator[](int i) const {
    const int n = f_.n_cells();
    if (i >= 0 && i < n) return f_.cell(i).data();
    if (f_.spatial().boundary() == Boundary::Periodic) return f_.cell((i % n + n) % n).data();
    if (i == -2) return mirrored_[0].data();
    if (i == -1) return mirrored_[1].data();
    if (i == n) return mirrored_[2].data();
    return mirrored_[3].data();
  }

 private:
  const DistributionField& f_;
  std::vector<double> mirrored_[4];
};

}  // namespace

DistributionField transport_muscl(const DistributionField& f, double dt, bool cfl_check,
                                  std::span<const std::uint8_t> active) {
  const SpatialGrid& sg = f.spatial();
  const VelocityGrid& vg = f.velocity();
  if (cfl_check) check_cfl(dt, vg, sg);
  const int n = f.n_cells();
  if (!active.empty() && active.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::Shape, "transport mask size does not match the grid");
  }
  const std::size_t cs = f.cell_size();
  const auto speed = vg.v1();
  std::vector<double> courant(cs);
  for (std::size_t k = 0; k < cs; ++k) courant[k] = speed[k] * dt / sg.dx();
  const double lambda = dt / sg.dx();

  const auto& simd = simd::kernels();
  const HaloView h(f);
  DistributionField out = f;
  // flux[j] holds the flux through face j - 1/2 (between cells j - 1 and j).
  std::vector<double> left(cs);
  std::vector<double> right(cs);
  int have_left_for = -100;
  for (int i = 0; i < n; ++i) {
    if (!is_active(active, i)) continue;
    if (have_left_for != i) {
      simd.muscl_flux(h[i - 2], h[i - 1], h[i], h[i + 1], speed.data(), courant.data(),
                      left.data(), cs);
    }
    simd.muscl_flux(h[i - 1], h[i], h[i + 1], h[i + 2], speed.data(), courant.data(),
                    right.data(), cs);
    simd.flux_update(h[i], left.data(), right.data(), lambda, out.cell(i).data(), cs);
    std::swap(left, right);
    have_left_for = i + 1;
  }
  return out;
}

DistributionField ap_step(const DistributionField& f, const KnudsenField& kn,
                          const SpectralKernel& kernel, const KineticStepConfig& cfg,
                          std::span<const std::uint8_t> active) {
  const int n = f.n_cells();
  if (kn.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::Shape, "Knudsen field size does not match the grid");
  }
  if (!(kernel.grid() == f.velocity())) {
    throw Error(ErrorKind::Shape, "collision kernel built for a different velocity grid");
  }
  DistributionField out = transport_muscl(f, cfg.dt, cfg.cfl_check, active);

  const VelocityGrid& vg = f.velocity();
  const std::size_t cs = f.cell_size();
  const auto& simd = simd::kernels();
  std::vector<double> q(cs);
  std::vector<double> m_old(cs);
  std::vector<double> m_new(cs);
  std::vector<double> fstar(cs);
  for (int i = 0; i < n; ++i) {
    if (!is_active(active, i)) continue;
    const double eps = kn.eps[static_cast<std::size_t>(i)];
    if (!(eps > 0.0)) {
      throw Error(ErrorKind::InvalidState, "Knudsen number must be > 0 (cell " +
                                               std::to_string(i) + ")");
    }
    const double a = cfg.dt / eps;
    if (a == 0.0) continue;  // collisionless limit: f* is the result
    try {
      const auto fn = f.cell(i);
      const CellMoments mn = cell_moments(fn, vg);
      discrete_maxwellian_cell(mn, vg, m_old);
      const double beta = penalty_beta_cell(mn, kernel.params());
      q_spectral(fn, kernel, q, i);
      auto fo = out.cell(i);
      std::copy(fo.begin(), fo.end(), fstar.begin());
      const CellMoments mstar = cell_moments(fstar, vg);
      discrete_maxwellian_cell(mstar, vg, m_new);
      simd.imex_combine(fstar.data(), q.data(), m_old.data(), fn.data(), m_new.data(), a, beta,
                        fo.data(), cs);
    } catch (const Error& e) {
      throw Error(e.kind(), "kinetic cell " + std::to_string(i) + ": " + e.detail());
    }
  }
  out.validate(cfg.tol_neg);
  return out;
}

}  // namespace kinuq
