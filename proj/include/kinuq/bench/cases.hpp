#pragma once

// Initial data, Knudsen profile and collision kernel for each experiment.

#include <optional>
#include <span>

#include "kinuq/bench/config.hpp"

namespace kinuq::bench {

struct CaseSetup {
  SpatialGrid sg;
  VelocityGrid vg;
  KnudsenField kn;
  CollisionParams collision;
  std::optional<MacroState> macro;         // equilibrium start
  std::optional<DistributionField> f;      // non-equilibrium start
};

// Number of random inputs z the case consumes (0 for deterministic cases).
std::size_t sample_dimension(CaseId c);

// eps0 + (tanh(1 - 11x) + tanh(1 + 11x)) / 2
double mixed_regime_eps(double x, double eps0);

// 1 + 0.4 sum_k z_k / (2k)
double perturbation_factor(std::span<const double> z);

// n_cells = 0 uses cfg.nx. An empty z means the nominal (z = 0) case.
CaseSetup build_case(const ExperimentConfig& cfg, std::span<const double> z = {}, int n_cells = 0);

}  // namespace kinuq::bench
