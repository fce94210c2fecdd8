#pragma once

// AP kinetic time stepper: limited second-order upwind transport in x followed
// by the BGK-penalized IMEX collision update, stable uniformly in epsilon.

#include <cstdint>
#include <span>

#include "kinuq/collision.hpp"
#include "kinuq/phase_space.hpp"

namespace kinuq {

enum class Limiter { Minmod };

struct KineticStepConfig {
  double dt = 0.0;
  bool cfl_check = true;
  Limiter limiter = Limiter::Minmod;
  double tol_neg = kDefaultTolNeg;
};

// dx / l_max
double max_stable_dt(const VelocityGrid& vg, const SpatialGrid& sg);

// Cells flagged in `active` (all cells when empty) are advanced; the rest are
// copied unchanged. Neighbour values are always read from f.
DistributionField transport_muscl(const DistributionField& f, double dt, bool cfl_check = true,
                                  std::span<const std::uint8_t> active = {});

/// One step f^n -> f^{n+1}:
///   f* = transport(f^n)
///   f^{n+1} = [f* + a (Q(f^n) - beta M^n + beta f^n) + a beta M^{n+1}] / (1 + a beta),
/// a = dt / eps per cell, M^n from moments(f^n), M^{n+1} from moments(f*).
/// Cells with eps = +inf get f* unchanged.
DistributionField ap_step(const DistributionField& f, const KnudsenField& kn,
                          const SpectralKernel& kernel, const KineticStepConfig& cfg,
                          std::span<const std::uint8_t> active = {});

}  // namespace kinuq
