#include "kinuq/uq/multifidelity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kinuq/error.hpp"
#include "kinuq/log.hpp"
#include "kinuq/uq/estimators.hpp"

namespace kinuq::uq {

Selection select_points(const Eigen::MatrixXd& snapshots, std::size_t k, double rel_tol) {
  const auto n = static_cast<std::size_t>(snapshots.cols());
  Selection sel;
  sel.requested = k;
  if (k == 0) throw Error(ErrorKind::Config, "select_points needs K >= 1");
  if (n == 0) throw Error(ErrorKind::Shape, "no candidate snapshots");

  const Eigen::MatrixXd g = snapshots.transpose() * snapshots;
  Eigen::VectorXd d = g.diagonal();
  const double dmax0 = d.maxCoeff();
  const std::size_t kk = std::min(k, n);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(kk));
  std::vector<bool> used(n, false);

  for (std::size_t it = 0; it < kk; ++it) {
    std::size_t p = n;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!used[i] && d[static_cast<Eigen::Index>(i)] > best) {
        best = d[static_cast<Eigen::Index>(i)];
        p = i;
      }
    }
    if (p == n || !(best > rel_tol * dmax0)) break;
    used[p] = true;
    sel.indices.push_back(p);
    const double piv = std::sqrt(best);
    const auto ip = static_cast<Eigen::Index>(p);
    const auto c = static_cast<Eigen::Index>(it);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (used[i] && i != p) continue;
      double s = g(ii, ip);
      for (Eigen::Index j = 0; j < c; ++j) s -= l(ii, j) * l(ip, j);
      l(ii, c) = s / piv;
      d[ii] -= l(ii, c) * l(ii, c);
    }
    d[ip] = 0.0;
  }
  if (sel.indices.size() < k) {
    sel.truncated = true;
    log::warn("select_points-rank", "requested " + std::to_string(k) + " points, numerical rank " +
                                        std::to_string(sel.indices.size()));
  }
  return sel;
}

namespace {

Eigen::VectorXd weighted_vector(const FieldSet& f, const std::array<double, kNumQuantities>& w) {
  const std::size_t n = f.n_cells();
  Eigen::VectorXd v(static_cast<Eigen::Index>(kNumQuantities * n));
  for (std::size_t k = 0; k < kNumQuantities; ++k) {
    if (f[k].size() != n) throw Error(ErrorKind::Shape, "ragged field set");
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(k * n + i)] = w[k] * f[k][i];
  }
  return v;
}

}  // namespace

namespace {

void factorize(SnapshotBasis& b, const BasisOptions& opts) {
  const auto kk = b.low.cols();
  b.gram = b.dx * (b.low.transpose() * b.low);
  b.ridge = kk > 0 ? opts.ridge_factor * b.gram.trace() / static_cast<double>(kk) : 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.gram, Eigen::EigenvaluesOnly);
  const double emax = es.eigenvalues().maxCoeff();
  const double emin = es.eigenvalues().minCoeff();
  b.condition = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
  const double cond_r = (emax + b.ridge) / std::max(emin + b.ridge, 1e-300);
  b.ill_conditioned = cond_r > opts.cond_limit;
  if (b.ill_conditioned) {
    log::warn("fidelity-conditioning",
              "Gram matrix condition " + std::to_string(cond_r) + " after ridge");
  }
  b.factor.compute(b.gram + b.ridge * Eigen::MatrixXd::Identity(kk, kk));
}

}  // namespace

SnapshotBasis build_basis(std::vector<RandomSample> candidates, const SampleRunner& low,
                          const SampleRunner& high, double dx, const BasisOptions& opts,
                          FidelityMode mode) {
  std::vector<FieldSet> snaps(candidates.size());
  parallel_for(candidates.size(), opts.workers,
               [&](std::size_t i) { snaps[i] = low(candidates[i]); });
  return build_basis(std::move(candidates), snaps, high, dx, opts, mode);
}

SnapshotBasis build_basis(std::vector<RandomSample> candidates,
                          const std::vector<FieldSet>& low_snapshots, const SampleRunner& high,
                          double dx, const BasisOptions& opts, FidelityMode mode) {
  if (candidates.size() != low_snapshots.size() || candidates.empty()) {
    throw Error(ErrorKind::Shape, "candidate and snapshot counts differ");
  }
  if (!(dx > 0.0)) throw Error(ErrorKind::Config, "inner-product weight must be > 0");
  SnapshotBasis b;
  b.mode = mode;
  b.dim = candidates[0].z.size();
  b.n_cells = low_snapshots[0].n_cells();
  b.dx = dx;
  for (const auto& c : candidates) {
    if (c.z.size() != b.dim) throw Error(ErrorKind::Shape, "candidates of different dimension");
  }

  if (opts.normalize_fields) {
    // Each block scaled by the inverse of its RMS over all candidates.
    for (std::size_t k = 0; k < kNumQuantities; ++k) {
      double s = 0.0;
      for (const auto& f : low_snapshots)
        for (double x : f[k]) s += x * x;
      const double rms = std::sqrt(s / static_cast<double>(low_snapshots.size() * b.n_cells));
      b.field_weight[k] = rms > 0.0 ? 1.0 / rms : 1.0;
    }
  }

  const auto len = static_cast<Eigen::Index>(kNumQuantities * b.n_cells);
  Eigen::MatrixXd all(len, static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t i = 0; i < low_snapshots.size(); ++i) {
    if (low_snapshots[i].n_cells() != b.n_cells) throw Error(ErrorKind::Shape, "snapshot grids differ");
    all.col(static_cast<Eigen::Index>(i)) = weighted_vector(low_snapshots[i], b.field_weight);
  }
  b.selection = select_points(all * std::sqrt(dx), opts.k);
  b.candidates = std::move(candidates);

  const auto kk = static_cast<Eigen::Index>(b.size());
  b.low.resize(len, kk);
  for (Eigen::Index j = 0; j < kk; ++j) b.low.col(j) = all.col(static_cast<Eigen::Index>(b.selection.indices[j]));

  std::vector<FieldSet> hi(b.size());
  parallel_for(b.size(), opts.workers, [&](std::size_t j) { hi[j] = high(b.point(j)); });
  const std::size_t nh = hi.empty() ? 0 : hi[0].n_cells();
  b.high.resize(static_cast<Eigen::Index>(kNumQuantities * nh), kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    b.high.col(j) = weighted_vector(hi[static_cast<std::size_t>(j)], {1.0, 1.0, 1.0, 1.0});
  }

  factorize(b, opts);
  return b;
}

SnapshotBasis truncate_basis(const SnapshotBasis& basis, std::size_t k, const BasisOptions& opts) {
  if (k == 0 || k > basis.size()) {
    throw Error(ErrorKind::Config, "cannot truncate a basis of " + std::to_string(basis.size()) +
                                       " to " + std::to_string(k));
  }
  SnapshotBasis b = basis;
  const auto kk = static_cast<Eigen::Index>(k);
  b.selection.indices.resize(k);
  b.selection.requested = k;
  b.selection.truncated = false;
  b.low = basis.low.leftCols(kk);
  b.high = basis.high.leftCols(kk);
  factorize(b, opts);
  return b;
}

Eigen::VectorXd fidelity_coeffs(const SnapshotBasis& basis, const FieldSet& low_at_z) {
  if (low_at_z.n_cells() != basis.n_cells) {
    throw Error(ErrorKind::Shape, "low-fidelity field has " + std::to_string(low_at_z.n_cells()) +
                                      " cells, basis has " + std::to_string(basis.n_cells));
  }
  const Eigen::VectorXd u = weighted_vector(low_at_z, basis.field_weight);
  const Eigen::VectorXd g = basis.dx * (basis.low.transpose() * u);
  Eigen::VectorXd c = basis.factor.solve(g);
  if (!c.allFinite()) throw Error(ErrorKind::NumericBreakdown, "non-finite fidelity coefficients");
  return c;
}

Eigen::VectorXd fidelity_coeffs(const SnapshotBasis& basis, const RandomSample& z,
                                const SampleRunner& low) {
  if (z.z.size() != basis.dim) {
    throw Error(ErrorKind::Shape, "sample dimension " + std::to_string(z.z.size()) +
                                      " does not match basis dimension " + std::to_string(basis.dim));
  }
  return fidelity_coeffs(basis, low(z));
}

FieldSet multifidelity_eval(const SnapshotBasis& basis, const FieldSet& low_at_z) {
  const Eigen::VectorXd c = fidelity_coeffs(basis, low_at_z);
  const Eigen::VectorXd v = basis.high * c;
  return unvectorize(Field(v.data(), v.data() + v.size()));
}

FieldSet multifidelity_eval(const SnapshotBasis& basis, const RandomSample& z,
                            const SampleRunner& low) {
  if (z.z.size() != basis.dim) {
    throw Error(ErrorKind::Shape, "sample dimension " + std::to_string(z.z.size()) +
                                      " does not match basis dimension " + std::to_string(basis.dim));
  }
  return multifidelity_eval(basis, low(z));
}

}  // namespace kinuq::uq
