#include "kinuq/uq/metrics.hpp"

#include <cmath>

#include "kinuq/error.hpp"

namespace kinuq::uq {

namespace {

Field on_grid(const Field& ref, std::size_t n) {
  if (ref.size() == n) return ref;
  if (ref.size() < n) throw Error(ErrorKind::Shape, "reference coarser than the runs");
  return restrict_conservative(ref, n);
}

void check_runs(std::span<const Field> runs) {
  if (runs.empty()) throw Error(ErrorKind::Config, "error of zero runs");
  for (const auto& r : runs) {
    if (r.size() != runs[0].size()) throw Error(ErrorKind::Shape, "runs on different grids");
  }
}

}  // namespace

double l2_norm(std::span<const double> a, double dx) {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s * dx);
}

double err_global(std::span<const Field> runs, const Field& ref, double dx) {
  check_runs(runs);
  const Field r = on_grid(ref, runs[0].size());
  double s = 0.0;
  for (const auto& q : runs) {
    double e = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) e += (q[i] - r[i]) * (q[i] - r[i]);
    s += e * dx;
  }
  return std::sqrt(s / static_cast<double>(runs.size()));
}

Field err_pointwise(std::span<const Field> runs, const Field& ref) {
  check_runs(runs);
  const Field r = on_grid(ref, runs[0].size());
  Field out(r.size(), 0.0);
  for (const auto& q : runs) {
    for (std::size_t i = 0; i < q.size(); ++i) out[i] += (q[i] - r[i]) * (q[i] - r[i]);
  }
  for (double& x : out) x = std::sqrt(x / static_cast<double>(runs.size()));
  return out;
}

double err_mean_l2(std::span<const Field> hi, std::span<const Field> approx, double dx) {
  if (hi.size() != approx.size() || hi.empty()) throw Error(ErrorKind::Shape, "unpaired held-out sets");
  double s = 0.0;
  for (std::size_t i = 0; i < hi.size(); ++i) {
    if (hi[i].size() != approx[i].size()) throw Error(ErrorKind::Shape, "held-out fields differ in size");
    double e = 0.0;
    for (std::size_t c = 0; c < hi[i].size(); ++c) e += (hi[i][c] - approx[i][c]) * (hi[i][c] - approx[i][c]);
    s += std::sqrt(e * dx);
  }
  return s / static_cast<double>(hi.size());
}

namespace {

std::vector<Field> pick(std::span<const FieldSet> s, std::size_t k) {
  std::vector<Field> out;
  out.reserve(s.size());
  for (const auto& f : s) out.push_back(f[k]);
  return out;
}

}  // namespace

std::array<double, kNumQuantities> err_global(std::span<const FieldSet> runs, const FieldSet& ref,
                                              double dx) {
  std::array<double, kNumQuantities> out{};
  for (std::size_t k = 0; k < kNumQuantities; ++k) out[k] = err_global(pick(runs, k), ref[k], dx);
  return out;
}

FieldSet err_pointwise(std::span<const FieldSet> runs, const FieldSet& ref) {
  FieldSet out;
  for (std::size_t k = 0; k < kNumQuantities; ++k) out[k] = err_pointwise(pick(runs, k), ref[k]);
  return out;
}

std::array<double, kNumQuantities> err_mean_l2(std::span<const FieldSet> hi,
                                               std::span<const FieldSet> approx, double dx) {
  std::array<double, kNumQuantities> out{};
  for (std::size_t k = 0; k < kNumQuantities; ++k) out[k] = err_mean_l2(pick(hi, k), pick(approx, k), dx);
  return out;
}

double relative_l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Shape, "relative_l2 size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) return std::sqrt(num);
  return std::sqrt(num / den);
}

}  // namespace kinuq::uq
