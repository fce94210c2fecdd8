#include "kinuq/fluid_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include "kinuq/error.hpp"

namespace kinuq {

ConservedState to_conserved(const MacroState& m) {
  ConservedState s(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    s.rho[i] = m.rho[i];
    s.mx[i] = m.rho[i] * m.ux[i];
    s.my[i] = m.rho[i] * m.uy[i];
    s.energy[i] = m.energy(i);
  }
  return s;
}

MacroState to_macro(const ConservedState& s) {
  MacroState m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double rho = s.rho[i];
    if (!(rho > 0.0)) {
      throw Error(ErrorKind::FluidVacuum, "non-positive density in cell " + std::to_string(i));
    }
    const double ux = s.mx[i] / rho;
    const double uy = s.my[i] / rho;
    const double internal = s.energy[i] - 0.5 * rho * (ux * ux + uy * uy);
    if (!(internal > 0.0)) {
      throw Error(ErrorKind::FluidVacuum,
                  "non-positive internal energy in cell " + std::to_string(i));
    }
    m.rho[i] = rho;
    m.ux[i] = ux;
    m.uy[i] = uy;
    m.temp[i] = internal / rho;
  }
  return m;
}

double max_wave_speed(const MacroState& m) {
  double a = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    a = std::max(a, std::fabs(m.ux[i]) + std::sqrt(2.0 * m.temp[i]));
  }
  return a;
}

Gradients gradients(const MacroState& m, const SpatialGrid& sg) {
  const int n = static_cast<int>(m.size());
  if (n < 3) throw Error(ErrorKind::Shape, "gradients need at least 3 cells");
  Gradients g;
  g.dux_dx.resize(m.size());
  g.dT_dx.resize(m.size());
  const double dx = sg.dx();
  const bool periodic = sg.boundary() == Boundary::Periodic;
  auto diff = [&](const std::vector<double>& q, std::vector<double>& d) {
    for (int i = 0; i < n; ++i) {
      const std::size_t c = static_cast<std::size_t>(i);
      if (i > 0 && i < n - 1) {
        d[c] = (q[c + 1] - q[c - 1]) / (2.0 * dx);
      } else if (periodic) {
        const std::size_t lo = static_cast<std::size_t>((i - 1 + n) % n);
        const std::size_t hi = static_cast<std::size_t>((i + 1) % n);
        d[c] = (q[hi] - q[lo]) / (2.0 * dx);
      } else if (i == 0) {
        d[c] = (q[1] - q[0]) / dx;
      } else {
        d[c] = (q[c] - q[c - 1]) / dx;
      }
    }
  };
  diff(m.ux, g.dux_dx);
  diff(m.temp, g.dT_dx);
  return g;
}

namespace {

using Prim = FacePrimitive;
using Cons = std::array<double, 4>;  // rho, mx, my, E

double minmod(double a, double b) {
  if (a * b > 0.0) return std::fabs(a) < std::fabs(b) ? a : b;
  return 0.0;
}

Cons prim_to_cons(const Prim& w) {
  return {w[0], w[0] * w[1], w[0] * w[2], 0.5 * w[0] * (w[1] * w[1] + w[2] * w[2]) + w[3]};
}

Cons physical_flux(const Prim& w) {
  const Cons u = prim_to_cons(w);
  return {u[1], u[1] * w[1] + w[3], u[2] * w[1], w[1] * (u[3] + w[3])};
}

double signal_speed(const Prim& w) { return std::fabs(w[1]) + std::sqrt(kGammaGas * w[3] / w[0]); }

Cons rusanov(const Prim& wl, const Prim& wr) {
  const Cons fl = physical_flux(wl);
  const Cons fr = physical_flux(wr);
  const Cons ul = prim_to_cons(wl);
  const Cons ur = prim_to_cons(wr);
  const double a = std::max(signal_speed(wl), signal_speed(wr));
  Cons f;
  for (int k = 0; k < 4; ++k) f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * a * (ur[k] - ul[k]);
  return f;
}

// Primitive state of cell i in -2 .. n+1 (ghosts by boundary rule).
class PrimitiveHalo {
 public:
  PrimitiveHalo(const ConservedState& s, Boundary bc) : n_(static_cast<int>(s.size())), bc_(bc) {
    w_.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double rho = s.rho[i];
      if (!(rho > 0.0)) {
        throw Error(ErrorKind::FluidVacuum, "non-positive density in cell " + std::to_string(i));
      }
      const double ux = s.mx[i] / rho;
      const double uy = s.my[i] / rho;
      const double p = s.energy[i] - 0.5 * rho * (ux * ux + uy * uy);
      if (!(p > 0.0)) {
        throw Error(ErrorKind::FluidVacuum, "non-positive pressure in cell " + std::to_string(i));
      }
      w_[i] = {rho, ux, uy, p};
    }
  }

  Prim operator[](int i) const {
    if (i >= 0 && i < n_) return w_[static_cast<std::size_t>(i)];
    if (bc_ == Boundary::Periodic) return w_[static_cast<std::size_t>((i % n_ + n_) % n_)];
    const int src = i < 0 ? -1 - i : 2 * n_ - 1 - i;
    Prim w = w_[static_cast<std::size_t>(src)];
    w[1] = -w[1];
    return w;
  }

  const Prim& cell(int i) const { return w_[static_cast<std::size_t>(i)]; }

 private:
  int n_;
  Boundary bc_;
  std::vector<Prim> w_;
};

Prim limited_slope(const PrimitiveHalo& h, int i) {
  const Prim a = h[i - 1];
  const Prim b = h[i];
  const Prim c = h[i + 1];
  Prim s;
  for (int k = 0; k < 4; ++k) s[k] = minmod(b[k] - a[k], c[k] - b[k]);
  return s;
}

}  // namespace

FaceStates reconstruct_faces(const ConservedState& s, Boundary bc) {
  const int n = static_cast<int>(s.size());
  const PrimitiveHalo h(s, bc);
  FaceStates out;
  out.left.resize(s.size() + 1);
  out.right.resize(s.size() + 1);
  for (int i = -1; i < n; ++i) {
    const Prim wi = h[i];
    const Prim wj = h[i + 1];
    const Prim si = limited_slope(h, i);
    const Prim sj = limited_slope(h, i + 1);
    Prim wl;
    Prim wr;
    for (int k = 0; k < 4; ++k) {
      wl[k] = wi[k] + 0.5 * si[k];
      wr[k] = wj[k] - 0.5 * sj[k];
    }
    // Positivity fallback: first order at this face.
    if (!(wl[0] > 0.0) || !(wl[3] > 0.0) || !(wr[0] > 0.0) || !(wr[3] > 0.0)) {
      wl = wi;
      wr = wj;
    }
    const std::size_t f = static_cast<std::size_t>(i + 1);
    out.left[f] = wl;
    out.right[f] = wr;
  }
  return out;
}

namespace {

bool frozen_at(std::span<const std::uint8_t> frozen, int i) {
  return !frozen.empty() && frozen[static_cast<std::size_t>(i)] != 0;
}

// out = base + dt * L(s) on unfrozen cells, base elsewhere.
ConservedState forward_euler(const ConservedState& s, const ConservedState& base,
                             const SpatialGrid& sg, double dt,
                             std::span<const std::uint8_t> frozen) {
  const int n = static_cast<int>(s.size());
  const FaceStates faces = reconstruct_faces(s, sg.boundary());
  const double lambda = dt / sg.dx();
  ConservedState out = base;
  Cons left = rusanov(faces.left[0], faces.right[0]);
  for (int i = 0; i < n; ++i) {
    const std::size_t f = static_cast<std::size_t>(i) + 1;
    const Cons right = rusanov(faces.left[f], faces.right[f]);
    if (!frozen_at(frozen, i)) {
      const std::size_t c = static_cast<std::size_t>(i);
      out.rho[c] = base.rho[c] - lambda * (right[0] - left[0]);
      out.mx[c] = base.mx[c] - lambda * (right[1] - left[1]);
      out.my[c] = base.my[c] - lambda * (right[2] - left[2]);
      out.energy[c] = base.energy[c] - lambda * (right[3] - left[3]);
    }
    left = right;
  }
  return out;
}

void check_positive(const ConservedState& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double rho = s.rho[i];
    const double kin = rho > 0.0 ? 0.5 * (s.mx[i] * s.mx[i] + s.my[i] * s.my[i]) / rho : 0.0;
    if (!(rho > 0.0) || !(s.energy[i] - kin > 0.0) || !std::isfinite(s.energy[i])) {
      throw Error(ErrorKind::FluidVacuum, "positivity lost in cell " + std::to_string(i));
    }
  }
}

}  // namespace

ConservedState euler_step(const ConservedState& s, const SpatialGrid& sg, double dt,
                          std::span<const std::uint8_t> frozen) {
  const std::size_t n = s.size();
  if (n != static_cast<std::size_t>(sg.n_cells())) {
    throw Error(ErrorKind::Shape, "conserved state size does not match the grid");
  }
  if (!frozen.empty() && frozen.size() != n) {
    throw Error(ErrorKind::Shape, "frozen mask size does not match the grid");
  }
  const double a = max_wave_speed(to_macro(s));
  const double dt_max = sg.dx() / a;
  if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "fluid dt=%.6g exceeds the CFL bound dt_max=%.6g", dt, dt_max);
    throw Error(ErrorKind::Stability, buf);
  }
  const ConservedState u1 = forward_euler(s, s, sg, dt, frozen);
  check_positive(u1);
  ConservedState u2 = forward_euler(u1, u1, sg, dt, frozen);
  for (std::size_t i = 0; i < n; ++i) {
    u2.rho[i] = 0.5 * s.rho[i] + 0.5 * u2.rho[i];
    u2.mx[i] = 0.5 * s.mx[i] + 0.5 * u2.mx[i];
    u2.my[i] = 0.5 * s.my[i] + 0.5 * u2.my[i];
    u2.energy[i] = 0.5 * s.energy[i] + 0.5 * u2.energy[i];
  }
  check_positive(u2);
  return u2;
}

}  // namespace kinuq
