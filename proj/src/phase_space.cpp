#include "kinuq/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "kinuq/error.hpp"
#include "kinuq/log.hpp"
#include "kinuq/simd/kernels.hpp"

namespace kinuq {

VelocityGrid::VelocityGrid(int n_per_dim, double l_max) : n_(n_per_dim), l_max_(l_max) {
  if (n_per_dim < 4 || n_per_dim % 2 != 0) {
    throw Error(ErrorKind::Config,
                "velocity grid needs an even n_per_dim >= 4, got " + std::to_string(n_per_dim));
  }
  if (!(l_max > 0.0) || !std::isfinite(l_max)) {
    throw Error(ErrorKind::Config, "velocity grid needs l_max > 0");
  }
  h_ = 2.0 * l_max / n_per_dim;
  nodes_.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) nodes_[static_cast<std::size_t>(i)] = -l_max + i * h_;
  v1_.resize(size());
  v2_.resize(size());
  for (int i1 = 0; i1 < n_; ++i1) {
    for (int i2 = 0; i2 < n_; ++i2) {
      const std::size_t k = static_cast<std::size_t>(i1) * n_ + i2;
      v1_[k] = nodes_[static_cast<std::size_t>(i1)];
      v2_[k] = nodes_[static_cast<std::size_t>(i2)];
    }
  }
}

SpatialGrid::SpatialGrid(int n_cells, double x_min, double x_max, Boundary boundary)
    : n_cells_(n_cells), x_min_(x_min), x_max_(x_max), boundary_(boundary) {
  if (n_cells < 4) {
    throw Error(ErrorKind::Config, "spatial grid needs n_cells >= 4, got " + std::to_string(n_cells));
  }
  dx_ = (x_max - x_min) / n_cells;
  if (!(dx_ > 0.0)) throw Error(ErrorKind::Config, "spatial grid needs x_max > x_min");
}

std::vector<double> SpatialGrid::centers() const {
  std::vector<double> c(static_cast<std::size_t>(n_cells_));
  for (int i = 0; i < n_cells_; ++i) c[static_cast<std::size_t>(i)] = center(i);
  return c;
}

std::vector<double> MacroState::energy() const {
  std::vector<double> e(size());
  for (std::size_t i = 0; i < size(); ++i) e[i] = energy(i);
  return e;
}

void MacroState::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (!(rho[i] > 0.0) || !(temp[i] > 0.0) || !std::isfinite(rho[i]) ||
        !std::isfinite(temp[i]) || !std::isfinite(ux[i]) || !std::isfinite(uy[i])) {
      throw Error(ErrorKind::InvalidState,
                  "macro state invalid at cell " + std::to_string(i) + " (rho=" +
                      std::to_string(rho[i]) + ", T=" + std::to_string(temp[i]) + ")");
    }
  }
}

DistributionField::DistributionField(SpatialGrid spatial, VelocityGrid velocity)
    : spatial_(std::move(spatial)),
      velocity_(std::move(velocity)),
      values_(static_cast<std::size_t>(spatial_.n_cells()) * velocity_.size(), 0.0) {}

std::size_t DistributionField::validate(double tol_neg) const {
  double vmax = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidState,
                  "non-finite distribution value in cell " +
                      std::to_string(k / velocity_.size()));
    }
    vmax = std::max(vmax, std::fabs(v));
  }
  const double threshold = -tol_neg * vmax;
  const auto negatives = static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [&](double v) { return v < threshold; }));
  if (negatives > 0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu values below -%.3g * max|f|", negatives, tol_neg);
    log::warn("tol_neg", buf);
  }
  return negatives;
}

namespace {

// exp(-(v_i - u)^2 / (2T)) for every 1D node.
void gaussian_factor(const VelocityGrid& vg, double u, double temp, std::vector<double>& out) {
  out.resize(static_cast<std::size_t>(vg.n()));
  const double inv2t = 1.0 / (2.0 * temp);
  for (int i = 0; i < vg.n(); ++i) {
    const double d = vg.node(i) - u;
    out[static_cast<std::size_t>(i)] = std::exp(-d * d * inv2t);
  }
}

void separable_maxwellian(double rho, double ux, double uy, double temp, const VelocityGrid& vg,
                          std::span<double> out) {
  thread_local std::vector<double> g1;
  thread_local std::vector<double> g2;
  gaussian_factor(vg, ux, temp, g1);
  gaussian_factor(vg, uy, temp, g2);
  const double amp = rho / (2.0 * std::numbers::pi * temp);
  const int n = vg.n();
  for (int i1 = 0; i1 < n; ++i1) {
    const double a = amp * g1[static_cast<std::size_t>(i1)];
    double* row = out.data() + static_cast<std::size_t>(i1) * n;
    for (int i2 = 0; i2 < n; ++i2) row[i2] = a * g2[static_cast<std::size_t>(i2)];
  }
}

void check_finite_output(std::span<const double> out, int cell) {
  for (double v : out) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidState,
                  "non-finite Maxwellian value in cell " + std::to_string(cell));
    }
  }
}

}  // namespace

void maxwellian_cell(const CellMoments& m, const VelocityGrid& vg, std::span<double> out) {
  if (out.size() != vg.size()) throw Error(ErrorKind::Shape, "maxwellian output size mismatch");
  if (!(m.rho > 0.0) || !(m.temp > 0.0)) {
    throw Error(ErrorKind::InvalidState, "maxwellian needs rho > 0 and T > 0");
  }
  separable_maxwellian(m.rho, m.ux, m.uy, m.temp, vg, out);
}

DistributionField maxwellian(const MacroState& m, const SpatialGrid& sg, const VelocityGrid& vg) {
  if (m.size() != static_cast<std::size_t>(sg.n_cells())) {
    throw Error(ErrorKind::Shape, "macro state size does not match spatial grid");
  }
  DistributionField f(sg, vg);
  for (int i = 0; i < sg.n_cells(); ++i) {
    const CellMoments c = m.cell(static_cast<std::size_t>(i));
    if (!(c.rho > 0.0) || !(c.temp > 0.0)) {
      throw Error(ErrorKind::InvalidState,
                  "maxwellian needs rho > 0 and T > 0 (cell " + std::to_string(i) + ")");
    }
    maxwellian_cell(c, vg, f.cell(i));
    check_finite_output(f.cell(i), i);
  }
  return f;
}

void discrete_maxwellian_cell(const CellMoments& m, const VelocityGrid& vg,
                              std::span<double> out) {
  maxwellian_cell(m, vg, out);
  const double w = vg.cell_weight();
  const auto v1 = vg.v1();
  const auto v2 = vg.v2();
  const std::size_t n = vg.size();
  // Target discrete moments of phi = (1, v1, v2, |v|^2).
  const double target[4] = {m.rho, m.rho * m.ux, m.rho * m.uy, 2.0 * m.energy()};
  const double scale[4] = {m.rho, m.rho * (1.0 + std::fabs(m.ux)), m.rho * (1.0 + std::fabs(m.uy)),
                           2.0 * m.energy()};

  double p[4] = {m.rho, m.ux, m.uy, m.temp};
  bool converged = false;
  for (int iter = 0; iter < 12; ++iter) {
    double mom[4] = {0, 0, 0, 0};
    double jac[4][4] = {};
    for (std::size_t k = 0; k < n; ++k) {
      const double f = out[k];
      const double d1 = v1[k] - p[1];
      const double d2 = v2[k] - p[2];
      const double r2 = d1 * d1 + d2 * d2;
      const double phi[4] = {1.0, v1[k], v2[k], v1[k] * v1[k] + v2[k] * v2[k]};
      // dM/dp for p = (rho, u1, u2, T)
      const double dm[4] = {f / p[0], f * d1 / p[3], f * d2 / p[3],
                            f * (r2 / (2.0 * p[3] * p[3]) - 1.0 / p[3])};
      for (int a = 0; a < 4; ++a) {
        mom[a] += phi[a] * f;
        for (int b = 0; b < 4; ++b) jac[a][b] += phi[a] * dm[b];
      }
    }
    double res[4];
    double err = 0.0;
    for (int a = 0; a < 4; ++a) {
      res[a] = target[a] - mom[a] * w;
      err = std::max(err, std::fabs(res[a]) / scale[a]);
      for (int b = 0; b < 4; ++b) jac[a][b] *= w;
    }
    if (err < 1e-14) {
      converged = true;
      break;
    }
    // Gaussian elimination with partial pivoting on the 4x4 system.
    double a[4][5];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] = jac[r][c];
      a[r][4] = res[r];
    }
    bool singular = false;
    for (int c = 0; c < 4; ++c) {
      int piv = c;
      for (int r = c + 1; r < 4; ++r) {
        if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
      }
      if (std::fabs(a[piv][c]) < 1e-300) {
        singular = true;
        break;
      }
      if (piv != c) {
        for (int k = 0; k < 5; ++k) std::swap(a[c][k], a[piv][k]);
      }
      for (int r = c + 1; r < 4; ++r) {
        const double fct = a[r][c] / a[c][c];
        for (int k = c; k < 5; ++k) a[r][k] -= fct * a[c][k];
      }
    }
    if (singular) break;
    double dp[4];
    for (int r = 3; r >= 0; --r) {
      double s = a[r][4];
      for (int k = r + 1; k < 4; ++k) s -= a[r][k] * dp[k];
      dp[r] = s / a[r][r];
    }
    for (int k = 0; k < 4; ++k) p[k] += dp[k];
    if (!(p[0] > 0.0) || !(p[3] > 0.0) || !std::isfinite(p[1]) || !std::isfinite(p[2])) break;
    separable_maxwellian(p[0], p[1], p[2], p[3], vg, out);
  }
  if (!converged) {
    log::warn("discrete_maxwellian", "moment matching did not converge; mass rescale only");
    maxwellian_cell(m, vg, out);
    double mass = 0.0;
    for (double v : out) mass += v;
    mass *= w;
    const double s = m.rho / mass;
    for (double& v : out) v *= s;
  }
}

CellMoments cell_moments(std::span<const double> f, const VelocityGrid& vg, double rho_floor) {
  const auto& k = simd::kernels();
  const simd::Sums3 s = k.first_moments(f.data(), vg.v1().data(), vg.v2().data(), f.size());
  CellMoments m;
  m.rho = s.s0 * vg.cell_weight();
  if (!(m.rho > rho_floor)) {
    throw Error(ErrorKind::DegenerateDensity,
                "density " + std::to_string(m.rho) + " at or below floor " +
                    std::to_string(rho_floor));
  }
  m.ux = s.s1 / s.s0;
  m.uy = s.s2 / s.s0;
  const double c2 = k.centered_energy(f.data(), vg.v1().data(), vg.v2().data(), m.ux, m.uy,
                                      f.size());
  m.temp = c2 / (2.0 * s.s0);
  return m;
}

MacroState moments(const DistributionField& f, double rho_floor) {
  MacroState m(static_cast<std::size_t>(f.n_cells()));
  for (int i = 0; i < f.n_cells(); ++i) {
    try {
      m.set(static_cast<std::size_t>(i), cell_moments(f.cell(i), f.velocity(), rho_floor));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateDensity) {
        log::warn("rho_floor", "cell " + std::to_string(i));
        throw Error(ErrorKind::DegenerateDensity, "cell " + std::to_string(i) + ": " + e.detail());
      }
      throw;
    }
  }
  return m;
}

AuxMoments aux_moments(const DistributionField& f) {
  const MacroState m = moments(f);
  const VelocityGrid& vg = f.velocity();
  const double w = vg.cell_weight();
  const auto v1 = vg.v1();
  const auto v2 = vg.v2();
  AuxMoments out;
  out.pressure.resize(m.size());
  out.heat_flux.resize(m.size());
  for (int i = 0; i < f.n_cells(); ++i) {
    const auto fc = f.cell(i);
    const std::size_t ci = static_cast<std::size_t>(i);
    PressureTensor p;
    double q1 = 0.0;
    double q2 = 0.0;
    for (std::size_t k = 0; k < fc.size(); ++k) {
      const double d1 = v1[k] - m.ux[ci];
      const double d2 = v2[k] - m.uy[ci];
      const double fw = fc[k] * w;
      p.xx += d1 * d1 * fw;
      p.xy += d1 * d2 * fw;
      p.yy += d2 * d2 * fw;
      const double half_r2 = 0.5 * (d1 * d1 + d2 * d2) * fw;
      q1 += d1 * half_r2;
      q2 += d2 * half_r2;
    }
    out.pressure[ci] = p;
    out.heat_flux[ci] = {q1, q2};
  }
  return out;
}

double l1_distance_cell(std::span<const double> f, std::span<const double> g,
                        const VelocityGrid& vg) {
  if (f.size() != g.size() || f.size() != vg.size()) {
    throw Error(ErrorKind::Shape, "l1 distance on slices of different size");
  }
  return simd::kernels().abs_diff_sum(f.data(), g.data(), f.size()) * vg.cell_weight();
}

std::vector<double> l1_distance(const DistributionField& f, const DistributionField& g) {
  if (!f.same_grids(g)) throw Error(ErrorKind::Shape, "l1 distance on different grids");
  std::vector<double> d(static_cast<std::size_t>(f.n_cells()));
  for (int i = 0; i < f.n_cells(); ++i) {
    d[static_cast<std::size_t>(i)] = l1_distance_cell(f.cell(i), g.cell(i), f.velocity());
  }
  return d;
}

double entropy_cell(std::span<const double> f, const VelocityGrid& vg) {
  double h = 0.0;
  for (double v : f) {
    const double c = std::max(v, kEntropyFloor);
    h += std::max(v, 0.0) * std::log(c);
  }
  return h * vg.cell_weight();
}

std::vector<double> entropy(const DistributionField& f) {
  std::vector<double> h(static_cast<std::size_t>(f.n_cells()));
  for (int i = 0; i < f.n_cells(); ++i) {
    h[static_cast<std::size_t>(i)] = entropy_cell(f.cell(i), f.velocity());
  }
  return h;
}

ConservedTotals conserved_totals(const DistributionField& f) {
  const VelocityGrid& vg = f.velocity();
  const auto v1 = vg.v1();
  const auto v2 = vg.v2();
  const double wdx = vg.cell_weight() * f.spatial().dx();
  ConservedTotals t;
  for (int i = 0; i < f.n_cells(); ++i) {
    const auto fc = f.cell(i);
    for (std::size_t k = 0; k < fc.size(); ++k) {
      t.mass += fc[k];
      t.mom_x += v1[k] * fc[k];
      t.mom_y += v2[k] * fc[k];
      t.energy += 0.5 * (v1[k] * v1[k] + v2[k] * v2[k]) * fc[k];
    }
  }
  t.mass *= wdx;
  t.mom_x *= wdx;
  t.mom_y *= wdx;
  t.energy *= wdx;
  return t;
}

}  // namespace kinuq
