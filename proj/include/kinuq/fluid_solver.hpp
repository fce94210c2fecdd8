#pragma once

// Compressible Euler solver for the d_v = 2 gas (p = rho T, gamma_gas = 2):
// minmod MUSCL on primitive variables, Rusanov flux, SSP-RK2 in time. Also the
// gradient stencils used by the hybrid breakdown criterion.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "kinuq/phase_space.hpp"

namespace kinuq {

inline constexpr double kGammaGas = 2.0;

/// Per cell (rho, rho ux, rho uy, E), E = rho |u|^2 / 2 + rho T.
struct ConservedState {
  std::vector<double> rho;
  std::vector<double> mx;
  std::vector<double> my;
  std::vector<double> energy;

  ConservedState() = default;
  explicit ConservedState(std::size_t n) : rho(n, 0.0), mx(n, 0.0), my(n, 0.0), energy(n, 0.0) {}
  std::size_t size() const noexcept { return rho.size(); }
};

struct TransportCoeffs {
  double mu = 1.0;
  double kappa = 1.0;
};

ConservedState to_conserved(const MacroState& m);
// Throws FluidVacuum when rho or the internal energy is not positive.
MacroState to_macro(const ConservedState& s);

// max over cells of |ux| + sqrt(2 T)
double max_wave_speed(const MacroState& m);

struct Gradients {
  std::vector<double> dux_dx;
  std::vector<double> dT_dx;
};

// Central differences in the interior; periodic wrap or one-sided differences
// at the ends depending on the boundary.
Gradients gradients(const MacroState& m, const SpatialGrid& sg);

using FacePrimitive = std::array<double, 4>;  // rho, ux, uy, p

/// Minmod-limited MUSCL states on both sides of every face. Entry f is face
/// f - 1/2, so there are n + 1 entries and the boundary faces use ghost cells.
struct FaceStates {
  std::vector<FacePrimitive> left;
  std::vector<FacePrimitive> right;
};

FaceStates reconstruct_faces(const ConservedState& s, Boundary bc);

/// One SSP-RK2 step. Cells flagged in `frozen` keep their values (they still
/// supply neighbour data); an empty mask advances every cell.
ConservedState euler_step(const ConservedState& s, const SpatialGrid& sg, double dt,
                          std::span<const std::uint8_t> frozen = {});

}  // namespace kinuq
