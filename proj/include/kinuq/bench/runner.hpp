#pragma once

// Orchestration: deterministic runs, the UQ estimators over solver runs,
// reference expectations and timing comparisons.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kinuq/bench/config.hpp"
#include "kinuq/uq/estimators.hpp"
#include "kinuq/uq/multifidelity.hpp"

namespace kinuq::bench {

struct RunResult {
  MacroState m;
  SpatialGrid sg{4, 0.0, 1.0, Boundary::Periodic};
  int steps = 0;
  double dt = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  std::vector<double> kinetic_fraction;  // after each step
  RegimeLabels labels;
  int invariant_checks = 0;              // steps whose partition/tally was verified
};

// One solver run to cfg.t_final on n_cells (0: cfg.nx).
RunResult run_model(const ExperimentConfig& cfg, SolverKind solver, std::span<const double> z = {},
                    int n_cells = 0);

// Hybrid steps whose partition/tally was verified, process-wide.
long long checked_hybrid_steps() noexcept;

uq::FieldSet run_fields(const ExperimentConfig& cfg, SolverKind solver, std::span<const double> z,
                        int n_cells = 0);

struct McResult {
  uq::FieldSet mean;
  uq::FieldSet variance;
  std::size_t clipped = 0;
  int runs = 0;
  double wall_seconds = 0.0;
};

// Stream kMonteCarlo + repetition offset.
McResult run_mc(const ExperimentConfig& cfg, int samples, int n_cells, std::uint64_t seed,
                int repetition = 0);

struct MlmcResult {
  uq::MlmcEstimate estimate;
  uq::FieldSet variance;
  std::size_t clipped = 0;
  std::vector<uq::LevelSpec> levels;
  std::vector<uq::LevelSamples> samples;  // restricted to the coarsest grid
};

std::vector<uq::LevelSpec> level_specs(const ExperimentConfig& cfg,
                                       std::span<const LevelPlan> plan);
MlmcResult run_mlmc(const ExperimentConfig& cfg, std::span<const LevelPlan> plan,
                    std::uint64_t seed, int repetition = 0, bool unit_lambda = false);

struct FidelityResult {
  uq::FidelityMode mode = uq::FidelityMode::Bi;
  std::vector<int> k;
  std::vector<std::array<double, uq::kNumQuantities>> err;  // per K, held-out mean L2
  std::array<double, uq::kNumQuantities> err_low{};          // selection model vs high
  double node_reproduction = 0.0;                            // max relative error at selected points
  std::vector<std::size_t> selected;                         // largest K, pivot order
  bool truncated = false;
  bool ill_conditioned = false;
  uq::FieldSet mean;    // of the largest-K approximation over the candidates
  uq::FieldSet stddev;
  int low_runs = 0;
  int high_runs = 0;
  double wall_seconds = 0.0;
};

// Bi: Euler selects, hybrid is high. Tri: hybrid selects, full kinetic is high.
FidelityResult run_multifidelity(const ExperimentConfig& cfg, uq::FidelityMode mode,
                                 std::uint64_t seed, int repetition = 0);

struct Reference {
  uq::FieldSet mean;
  SpatialGrid sg{4, 0.0, 1.0, Boundary::Periodic};
  std::string key;
  bool from_cache = false;
  int runs = 0;
};

// Full-kinetic reference on cfg.uq.reference_nx cells: the deterministic
// solution, or the expectation over z by a tensor Gauss rule in the sums
// through which the case depends on z. Cached under cache_dir when given.
Reference make_reference(const ExperimentConfig& cfg, const std::string& cache_dir = {});
std::string reference_key(const ExperimentConfig& cfg);

double median(std::vector<double> v);
// Median full-kinetic wall time over median hybrid wall time.
double timing_ratio(std::span<const double> kinetic_seconds, std::span<const double> hybrid_seconds);

}  // namespace kinuq::bench
