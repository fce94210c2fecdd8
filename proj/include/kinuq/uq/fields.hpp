#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kinuq/phase_space.hpp"

namespace kinuq::uq {

using Field = std::vector<double>;

inline constexpr std::size_t kNumQuantities = 4;
inline constexpr std::array<std::string_view, kNumQuantities> kQuantityNames = {"rho", "ux", "uy",
                                                                               "T"};

/// Macroscopic output fields of one model run: rho, ux, uy, T per cell.
struct FieldSet {
  std::array<Field, kNumQuantities> q;

  FieldSet() = default;
  explicit FieldSet(std::size_t n_cells);
  static FieldSet from_macro(const MacroState& m);

  std::size_t n_cells() const noexcept { return q[0].size(); }
  Field& operator[](std::size_t k) noexcept { return q[k]; }
  const Field& operator[](std::size_t k) const noexcept { return q[k]; }
};

// Average groups of n_fine / n_coarse neighbouring cells (preserves the
// discrete integral). Throws Config when the grids do not nest.
Field restrict_conservative(const Field& fine, std::size_t n_coarse);
FieldSet restrict_conservative(const FieldSet& fine, std::size_t n_coarse);

// Concatenation [rho | ux | uy | T].
Field vectorize(const FieldSet& f);
FieldSet unvectorize(const Field& v);

// Mean of equally weighted fields by a fixed pairwise tree: merged means
// m = mA + (mB - mA) nB / (nA + nB). The result is independent of how the
// samples were scheduled, and identical inputs give back that input exactly.
Field tree_mean(std::span<const Field> samples);
Field tree_mean(std::span<const Field* const> samples);

}  // namespace kinuq::uq
