#pragma once

// Monte Carlo and control-variate multilevel Monte Carlo estimators over
// spatial fields, and the E[q^2] - E[q]^2 variance field.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kinuq/uq/fields.hpp"
#include "kinuq/uq/sampling.hpp"

namespace kinuq::uq {

// Runs fn(i) for i in [0, n) on `workers` threads. Exceptions are rethrown
// after all workers stop (the one from the lowest index wins).
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

Field mc_estimate(std::span<const Field> samples);
FieldSet mc_estimate(std::span<const FieldSet> samples);

struct LambdaResult {
  Field lambda;
  std::size_t degenerate_cells = 0;  // zero coarse variance: lambda set to 1
};

// Per-cell regression slope of fine on coarse samples (paired by index).
LambdaResult lambda_coeff(std::span<const Field> fine, std::span<const Field> coarse);
// Domain-averaged variant: one slope from the per-sample cell means.
LambdaResult lambda_coeff_scalar(std::span<const Field> fine, std::span<const Field> coarse);

// Unbiased per-cell sample variance of fine - lambda * coarse.
Field difference_variance(std::span<const Field> fine, std::span<const Field> coarse,
                          const Field& lambda);

struct LevelSpec {
  int level = 0;
  int n_cells = 0;
  double dt = 0.0;
  int samples = 0;
};

void validate_levels(std::span<const LevelSpec> levels);

/// Samples of one level, already restricted to the coarsest grid. coarse is
/// empty on level 0.
struct LevelSamples {
  std::vector<FieldSet> fine;
  std::vector<FieldSet> coarse;
};

struct MlmcOptions {
  bool scalar_lambda = false;
  bool unit_lambda = false;          // plain telescoping MLMC
  bool share_samples = false;        // every level draws the same stream
  int workers = 1;
  std::uint64_t stream_offset = 0;   // repetition offset
};

struct MlmcEstimate {
  FieldSet estimate;                    // on the coarsest grid
  std::vector<FieldSet> lambda;         // lambda_l, l = 0 .. L-1 (last is 1)
  std::vector<FieldSet> level_mean;     // E_{M_l}[q_l - lambda_{l-1} q_{l-1}]
  std::vector<FieldSet> level_variance; // sample variance of the same
  std::vector<std::size_t> degenerate;  // per level pair, over quantities
  std::vector<double> wall_seconds;     // per level
  std::vector<int> model_runs;          // per level
};

MlmcEstimate mlmc_combine(std::span<const LevelSamples> levels, const MlmcOptions& opts = {});

// Square every sample value (for E[q^2]).
std::vector<LevelSamples> squared(std::span<const LevelSamples> levels);

using ModelRunner = std::function<FieldSet(const RandomSample&, const LevelSpec&)>;

/// Runs the coupled samples (same z on meshes N_l and N_{l-1}) and combines
/// them. Level l draws stream kMlmcLevel0 + l unless opts.share_samples.
std::vector<LevelSamples> mlmc_sample(std::span<const LevelSpec> levels, const ModelRunner& run,
                                      std::size_t dim, std::uint64_t master_seed,
                                      const MlmcOptions& opts, std::vector<double>* wall = nullptr,
                                      std::vector<int>* runs = nullptr);
MlmcEstimate mlmc_estimate(std::span<const LevelSpec> levels, const ModelRunner& run,
                           std::size_t dim, std::uint64_t master_seed,
                           const MlmcOptions& opts = {});

struct VarianceField {
  Field variance;
  std::size_t clipped = 0;  // negative values set to 0
};

VarianceField variance_field(const Field& mean_of_square, const Field& mean);
VarianceField variance_field_mc(std::span<const Field> samples);

}  // namespace kinuq::uq
