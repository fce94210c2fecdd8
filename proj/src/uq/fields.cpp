#include "kinuq/uq/fields.hpp"

#include <string>

#include "kinuq/error.hpp"

namespace kinuq::uq {

FieldSet::FieldSet(std::size_t n_cells) {
  for (auto& f : q) f.assign(n_cells, 0.0);
}

FieldSet FieldSet::from_macro(const MacroState& m) {
  FieldSet s;
  s.q = {m.rho, m.ux, m.uy, m.temp};
  return s;
}

Field restrict_conservative(const Field& fine, std::size_t n_coarse) {
  if (n_coarse == 0 || fine.size() % n_coarse != 0) {
    throw Error(ErrorKind::Config, "grid of " + std::to_string(fine.size()) +
                                       " cells does not nest onto " + std::to_string(n_coarse));
  }
  const std::size_t r = fine.size() / n_coarse;
  if (r == 1) return fine;
  Field out(n_coarse);
  for (std::size_t i = 0; i < n_coarse; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < r; ++k) s += fine[i * r + k];
    out[i] = s / static_cast<double>(r);
  }
  return out;
}

FieldSet restrict_conservative(const FieldSet& fine, std::size_t n_coarse) {
  FieldSet out;
  for (std::size_t k = 0; k < kNumQuantities; ++k) out[k] = restrict_conservative(fine[k], n_coarse);
  return out;
}

Field vectorize(const FieldSet& f) {
  Field v;
  v.reserve(kNumQuantities * f.n_cells());
  for (const auto& q : f.q) v.insert(v.end(), q.begin(), q.end());
  return v;
}

FieldSet unvectorize(const Field& v) {
  if (v.size() % kNumQuantities != 0) throw Error(ErrorKind::Shape, "vector length not 4 * n_cells");
  const std::size_t n = v.size() / kNumQuantities;
  FieldSet f;
  for (std::size_t k = 0; k < kNumQuantities; ++k) {
    f[k].assign(v.begin() + static_cast<std::ptrdiff_t>(k * n),
                v.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return f;
}

namespace {

Field tree_mean_range(std::span<const Field* const> s, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return *s[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  Field a = tree_mean_range(s, lo, mid);
  const Field b = tree_mean_range(s, mid, hi);
  const double w = static_cast<double>(hi - mid) / static_cast<double>(hi - lo);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = a[i] + (b[i] - a[i]) * w;
  return a;
}

}  // namespace

Field tree_mean(std::span<const Field* const> samples) {
  if (samples.empty()) throw Error(ErrorKind::Config, "mean of zero samples");
  const std::size_t n = samples[0]->size();
  for (const Field* f : samples) {
    if (f->size() != n) throw Error(ErrorKind::Shape, "samples of different length");
  }
  return tree_mean_range(samples, 0, samples.size());
}

Field tree_mean(std::span<const Field> samples) {
  std::vector<const Field*> p;
  p.reserve(samples.size());
  for (const auto& f : samples) p.push_back(&f);
  return tree_mean(std::span<const Field* const>(p));
}

}  // namespace kinuq::uq
