#pragma once

// Error measures on uniform 1D grids. Fields on a finer grid than the
// runs are restricted conservatively first.

#include <array>
#include <span>

#include "kinuq/uq/fields.hpp"

namespace kinuq::uq {

// ||a||^2 = sum a_i^2 dx
double l2_norm(std::span<const double> a, double dx);

// sqrt( (1/J) sum_j ||q_j - ref||^2 )
double err_global(std::span<const Field> runs, const Field& ref, double dx);
// per cell sqrt( (1/J) sum_j (q_j - ref)^2 )
Field err_pointwise(std::span<const Field> runs, const Field& ref);
// (1/N) sum_i ||hi_i - approx_i||
double err_mean_l2(std::span<const Field> hi, std::span<const Field> approx, double dx);

std::array<double, kNumQuantities> err_global(std::span<const FieldSet> runs, const FieldSet& ref,
                                              double dx);
FieldSet err_pointwise(std::span<const FieldSet> runs, const FieldSet& ref);
std::array<double, kNumQuantities> err_mean_l2(std::span<const FieldSet> hi,
                                               std::span<const FieldSet> approx, double dx);

// ||a - b|| / ||b||
double relative_l2(std::span<const double> a, std::span<const double> b);

}  // namespace kinuq::uq
