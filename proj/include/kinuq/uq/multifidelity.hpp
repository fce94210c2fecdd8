#pragma once

// Bi/tri-fidelity approximation: a cheap model picks K informative sample
// points and supplies projection coefficients; the expensive model is run
// only at those points and recombined with the same coefficients.

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "kinuq/uq/fields.hpp"
#include "kinuq/uq/sampling.hpp"

namespace kinuq::uq {

enum class FidelityMode { Bi, Tri };

using SampleRunner = std::function<FieldSet(const RandomSample&)>;

struct Selection {
  std::vector<std::size_t> indices;  // pivot order
  std::size_t requested = 0;
  bool truncated = false;            // numerical rank < requested
};

// Greedy pivoted Cholesky on the Gram matrix of the columns of `snapshots`.
// Stops early once the largest residual diagonal drops below
// rel_tol * (largest initial diagonal). Ties go to the lowest index.
Selection select_points(const Eigen::MatrixXd& snapshots, std::size_t k, double rel_tol = 1e-12);

struct BasisOptions {
  std::size_t k = 10;
  double ridge_factor = 1e-10;  // ridge = ridge_factor * trace(G) / K
  bool normalize_fields = false;
  int workers = 1;
  double cond_limit = 1e12;
};

struct SnapshotBasis {
  FidelityMode mode = FidelityMode::Bi;
  std::vector<RandomSample> candidates;
  Selection selection;
  std::size_t dim = 0;       // random-input dimension
  std::size_t n_cells = 0;
  double dx = 1.0;           // inner-product weight
  std::array<double, kNumQuantities> field_weight{1.0, 1.0, 1.0, 1.0};
  Eigen::MatrixXd low;       // selected low-fidelity snapshots (columns)
  Eigen::MatrixXd high;      // high-fidelity snapshots at the same points
  Eigen::MatrixXd gram;
  double ridge = 0.0;
  double condition = 1.0;
  bool ill_conditioned = false;
  Eigen::LDLT<Eigen::MatrixXd> factor;

  std::size_t size() const noexcept { return selection.indices.size(); }
  // Candidate-set index of the k-th selected point.
  const RandomSample& point(std::size_t k) const { return candidates[selection.indices[k]]; }
};

// Runs `low` on every candidate, selects K points, runs `high` on those.
SnapshotBasis build_basis(std::vector<RandomSample> candidates, const SampleRunner& low,
                          const SampleRunner& high, double dx, const BasisOptions& opts,
                          FidelityMode mode = FidelityMode::Bi);

// Same, but from precomputed low-fidelity candidate snapshots.
SnapshotBasis build_basis(std::vector<RandomSample> candidates,
                          const std::vector<FieldSet>& low_snapshots, const SampleRunner& high,
                          double dx, const BasisOptions& opts, FidelityMode mode = FidelityMode::Bi);

// First k selected points of a basis (the greedy selection is nested).
SnapshotBasis truncate_basis(const SnapshotBasis& basis, std::size_t k, const BasisOptions& opts);

// Solve (G + ridge I) c = g with g_k = <u_low, low_k>.
Eigen::VectorXd fidelity_coeffs(const SnapshotBasis& basis, const FieldSet& low_at_z);
Eigen::VectorXd fidelity_coeffs(const SnapshotBasis& basis, const RandomSample& z,
                                const SampleRunner& low);

FieldSet multifidelity_eval(const SnapshotBasis& basis, const FieldSet& low_at_z);
FieldSet multifidelity_eval(const SnapshotBasis& basis, const RandomSample& z,
                            const SampleRunner& low);

}  // namespace kinuq::uq
