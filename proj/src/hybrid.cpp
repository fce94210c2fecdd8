#include "kinuq/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "kinuq/error.hpp"

namespace kinuq {

std::size_t RegimeLabels::count(Regime r) const {
  return static_cast<std::size_t>(std::count(label.begin(), label.end(), r));
}

double RegimeLabels::fraction(Regime r) const {
  return label.empty() ? 0.0 : static_cast<double>(count(r)) / static_cast<double>(label.size());
}

std::vector<std::uint8_t> RegimeLabels::mask(Regime r) const {
  std::vector<std::uint8_t> m(label.size());
  for (std::size_t i = 0; i < label.size(); ++i) m[i] = label[i] == r ? 1 : 0;
  return m;
}

void CriterionThresholds::validate() const {
  if (!(eta0 >= 0.0) || !(delta0 >= 0.0)) {
    throw Error(ErrorKind::Config, "criterion thresholds must be non-negative");
  }
}

bool crit_fluid_to_kinetic_cell(double rho, double temp, double eps, double dux_dx, double dT_dx,
                                const TransportCoeffs& c, const CriterionThresholds& th) {
  const double first = eps * (c.mu / (rho * temp)) * dux_dx;
  const double second =
      eps * eps * (c.kappa * c.kappa / (rho * rho * temp * temp * temp)) * (dT_dx * dT_dx);
  return std::fabs(first + second) > th.eta0 || std::fabs(first) > th.eta0;
}

std::vector<std::uint8_t> crit_fluid_to_kinetic(const MacroState& m, const KnudsenField& kn,
                                                const TransportCoeffs& c,
                                                const CriterionThresholds& th,
                                                const SpatialGrid& sg) {
  const Gradients g = gradients(m, sg);
  std::vector<std::uint8_t> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    out[i] = crit_fluid_to_kinetic_cell(m.rho[i], m.temp[i], kn.eps[i], g.dux_dx[i], g.dT_dx[i],
                                        c, th)
                 ? 1
                 : 0;
  }
  return out;
}

double equilibrium_distance(std::span<const double> f, const VelocityGrid& vg) {
  thread_local std::vector<double> eq;
  eq.resize(f.size());
  maxwellian_cell(cell_moments(f, vg), vg, eq);
  return l1_distance_cell(f, eq, vg);
}

bool crit_kinetic_to_fluid_cell(std::span<const double> f, const VelocityGrid& vg,
                                const CriterionThresholds& th) {
  return equilibrium_distance(f, vg) <= th.delta0;
}

std::vector<std::uint8_t> crit_kinetic_to_fluid(const DistributionField& f,
                                                const CriterionThresholds& th) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(f.n_cells()));
  for (int i = 0; i < f.n_cells(); ++i) {
    out[static_cast<std::size_t>(i)] = crit_kinetic_to_fluid_cell(f.cell(i), f.velocity(), th);
  }
  return out;
}

void lift(const MacroState& m, DistributionField& f, std::span<const int> cells) {
  for (int i : cells) {
    const CellMoments c = m.cell(static_cast<std::size_t>(i));
    if (!(c.rho > 0.0) || !(c.temp > 0.0)) {
      throw Error(ErrorKind::InvalidState, "lift of an invalid state in cell " + std::to_string(i));
    }
    discrete_maxwellian_cell(c, f.velocity(), f.cell(i));
  }
}

void project(const DistributionField& f, MacroState& m, std::span<const int> cells) {
  for (int i : cells) {
    try {
      m.set(static_cast<std::size_t>(i), cell_moments(f.cell(i), f.velocity()));
    } catch (const Error& e) {
      throw Error(e.kind(), "projecting cell " + std::to_string(i) + ": " + e.detail());
    }
  }
}

namespace {

// Cells of regime `self` with a cell of the other regime within two cells.
std::vector<int> interface_cells(const RegimeLabels& labels, Regime self, Boundary bc) {
  const int n = static_cast<int>(labels.size());
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (labels.label[static_cast<std::size_t>(i)] != self) continue;
    bool near = false;
    for (int d = -2; d <= 2 && !near; ++d) {
      if (d == 0) continue;
      int j = i + d;
      if (bc == Boundary::Periodic) {
        j = (j % n + n) % n;
      } else if (j < 0 || j >= n) {
        continue;
      }
      near = labels.label[static_cast<std::size_t>(j)] != self;
    }
    if (near) out.push_back(i);
  }
  return out;
}

std::vector<int> cells_with(const RegimeLabels& labels, Regime r) {
  std::vector<int> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels.label[i] == r) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

GhostReport ghost_sync(HybridState& state, const MacroState& fluid_source) {
  const Boundary bc = state.f.spatial().boundary();
  GhostReport r;
  r.lifted = interface_cells(state.labels, Regime::Fluid, bc);
  r.projected = interface_cells(state.labels, Regime::Kinetic, bc);
  lift(fluid_source, state.f, r.lifted);
  project(state.f, state.m, r.projected);
  return r;
}

GhostReport ghost_sync(HybridState& state) { return ghost_sync(state, state.m); }

HybridState hybrid_from_macro(const MacroState& m, const KnudsenField& kn,
                              const VelocityGrid& vg, const SpatialGrid& sg) {
  m.validate();
  if (m.size() != static_cast<std::size_t>(sg.n_cells()) || kn.size() != m.size()) {
    throw Error(ErrorKind::Shape, "hybrid state sizes do not match the grid");
  }
  HybridState s{DistributionField(sg, vg), m, {}, kn, 0, {}, {}};
  s.labels.label.assign(m.size(), Regime::Fluid);
  std::vector<int> all(m.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  lift(m, s.f, all);
  return s;
}

HybridState hybrid_from_distribution(const DistributionField& f, const KnudsenField& kn,
                                     const HybridConfig& cfg) {
  if (kn.size() != static_cast<std::size_t>(f.n_cells())) {
    throw Error(ErrorKind::Shape, "Knudsen field size does not match the grid");
  }
  MacroState m = moments(f);
  const auto fk = crit_fluid_to_kinetic(m, kn, cfg.coeffs, cfg.thresholds, f.spatial());
  const auto kf = crit_kinetic_to_fluid(f, cfg.thresholds);
  HybridState s{f, std::move(m), {}, kn, 0, {}, {}};
  s.labels.label.resize(kf.size());
  for (std::size_t i = 0; i < kf.size(); ++i) {
    s.labels.label[i] = (kf[i] && !fk[i]) ? Regime::Fluid : Regime::Kinetic;
  }
  return s;
}

HybridState hybrid_step(const HybridState& state, const SpectralKernel& kernel,
                        const HybridConfig& cfg) {
  cfg.thresholds.validate();
  HybridState s = state;
  const SpatialGrid& sg = s.f.spatial();
  const std::size_t n = s.labels.size();
  s.update_count.assign(n, 0);
  s.advanced_by.assign(n, Regime::Fluid);

  // (a) breakdown test on fluid cells; kinetic cells contribute projected moments.
  std::vector<std::uint8_t> moved_in(n, 0);
  {
    const auto fk = crit_fluid_to_kinetic(s.m, s.kn, cfg.coeffs, cfg.thresholds, sg);
    std::vector<int> to_lift;
    for (std::size_t i = 0; i < n; ++i) {
      if (s.labels.label[i] == Regime::Fluid && fk[i]) {
        to_lift.push_back(static_cast<int>(i));
        moved_in[i] = 1;
      }
    }
    lift(s.m, s.f, to_lift);
    for (int i : to_lift) s.labels.label[static_cast<std::size_t>(i)] = Regime::Kinetic;
  }
  const MacroState m_old = s.m;
  const auto kinetic_mask = s.labels.mask(Regime::Kinetic);

  // (b) fluid cells, kinetic cells frozen as neighbour data.
  if (s.labels.count(Regime::Fluid) > 0) {
    try {
      const MacroState next = to_macro(euler_step(to_conserved(s.m), sg, cfg.dt, kinetic_mask));
      for (std::size_t i = 0; i < n; ++i) {
        if (s.labels.label[i] == Regime::Fluid) {
          s.m.set(i, next.cell(i));
          ++s.update_count[i];
          s.advanced_by[i] = Regime::Fluid;
        }
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "fluid regime: " + e.detail());
    }
  }

  // (c) kinetic cells, with Maxwellian ghosts lifted from the time-n fluid states.
  if (s.labels.count(Regime::Kinetic) > 0) {
    ghost_sync(s, m_old);
    KineticStepConfig kcfg;
    kcfg.dt = cfg.dt;
    kcfg.tol_neg = cfg.tol_neg;
    try {
      s.f = ap_step(s.f, s.kn, kernel, kcfg, kinetic_mask);
    } catch (const Error& e) {
      throw Error(e.kind(), "kinetic regime: " + e.detail());
    }
    const auto kin = cells_with(s.labels, Regime::Kinetic);
    project(s.f, s.m, kin);
    for (int i : kin) {
      ++s.update_count[static_cast<std::size_t>(i)];
      s.advanced_by[static_cast<std::size_t>(i)] = Regime::Kinetic;
    }
  }

  // (d) equilibrium test on kinetic cells that were not just moved in.
  for (std::size_t i = 0; i < n; ++i) {
    if (s.labels.label[i] != Regime::Kinetic || moved_in[i]) continue;
    if (crit_kinetic_to_fluid_cell(s.f.cell(static_cast<int>(i)), s.f.velocity(), cfg.thresholds)) {
      s.labels.label[i] = Regime::Fluid;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (s.update_count[i] != 1) {
      throw Error(ErrorKind::InvalidState, "cell " + std::to_string(i) + " updated " +
                                               std::to_string(s.update_count[i]) +
                                               " times in one hybrid step");
    }
  }
  ++s.step;
  if (cfg.record_history) s.labels.history.push_back(s.labels.label);
  return s;
}

void write_label_history(std::ostream& os, const RegimeLabels& labels) {
  os << "step,cell,label\n";
  for (std::size_t k = 0; k < labels.history.size(); ++k) {
    const auto& row = labels.history[k];
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (k + 1) << ',' << i << ',' << static_cast<int>(row[i]) << '\n';
    }
  }
}

}  // namespace kinuq
