#pragma once

// Asymptotic-preserving hybrid (APH) coupling: per-cell regime labels, the
// fluid->kinetic breakdown and kinetic->fluid equilibrium criteria, lift /
// project conversions, interface ghosts, and the staggered coupled step.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kinuq/collision.hpp"
#include "kinuq/fluid_solver.hpp"
#include "kinuq/kinetic_solver.hpp"
#include "kinuq/phase_space.hpp"

namespace kinuq {

enum class Regime : std::uint8_t { Fluid = 0, Kinetic = 1 };

struct RegimeLabels {
  std::vector<Regime> label;
  // One entry per completed step when recording is enabled.
  std::vector<std::vector<Regime>> history;

  std::size_t size() const noexcept { return label.size(); }
  std::size_t count(Regime r) const;
  double fraction(Regime r) const;
  std::vector<std::uint8_t> mask(Regime r) const;
};

struct CriterionThresholds {
  double eta0 = 1e-2;
  double delta0 = 1e-4;

  void validate() const;
};

struct HybridState {
  DistributionField f;  // authoritative on kinetic cells
  MacroState m;         // authoritative on fluid cells, = moments(f) on kinetic cells
  RegimeLabels labels;
  KnudsenField kn;
  int step = 0;
  // Solver updates per cell in the last step (each must be exactly 1).
  std::vector<int> update_count;
  std::vector<Regime> advanced_by;  // solver that advanced each cell in the last step
};

struct HybridConfig {
  double dt = 0.0;
  TransportCoeffs coeffs;
  CriterionThresholds thresholds;
  bool record_history = false;
  double tol_neg = kDefaultTolNeg;
};

bool crit_fluid_to_kinetic_cell(double rho, double temp, double eps, double dux_dx, double dT_dx,
                                const TransportCoeffs& c, const CriterionThresholds& th);
// Evaluated on every cell; callers restrict to fluid cells.
std::vector<std::uint8_t> crit_fluid_to_kinetic(const MacroState& m, const KnudsenField& kn,
                                                const TransportCoeffs& c,
                                                const CriterionThresholds& th,
                                                const SpatialGrid& sg);

double equilibrium_distance(std::span<const double> f, const VelocityGrid& vg);
bool crit_kinetic_to_fluid_cell(std::span<const double> f, const VelocityGrid& vg,
                                const CriterionThresholds& th);
std::vector<std::uint8_t> crit_kinetic_to_fluid(const DistributionField& f,
                                                const CriterionThresholds& th);

// f := Maxwellian(m) on the listed cells, moment-matched on the grid.
void lift(const MacroState& m, DistributionField& f, std::span<const int> cells);
// m := moments(f) on the listed cells.
void project(const DistributionField& f, MacroState& m, std::span<const int> cells);

struct GhostReport {
  std::vector<int> lifted;     // fluid cells supplying ghosts to kinetic neighbours
  std::vector<int> projected;  // kinetic cells supplying ghosts to fluid neighbours
};

// Cells within two cells of the other regime (periodic wrap when the grid is
// periodic). Lifts fluid_source onto the fluid ghosts and projects f on the
// kinetic ones.
GhostReport ghost_sync(HybridState& state, const MacroState& fluid_source);
GhostReport ghost_sync(HybridState& state);

/// Start from macroscopic data (an equilibrium start): every cell Fluid.
HybridState hybrid_from_macro(const MacroState& m, const KnudsenField& kn,
                              const VelocityGrid& vg, const SpatialGrid& sg);

/// Start from a distribution: a cell is Fluid iff it already satisfies the
/// equilibrium criterion and not the breakdown criterion.
HybridState hybrid_from_distribution(const DistributionField& f, const KnudsenField& kn,
                                     const HybridConfig& cfg);

HybridState hybrid_step(const HybridState& state, const SpectralKernel& kernel,
                        const HybridConfig& cfg);

// Label history CSV: step,cell,label (0 fluid, 1 kinetic).
void write_label_history(std::ostream& os, const RegimeLabels& labels);

}  // namespace kinuq
