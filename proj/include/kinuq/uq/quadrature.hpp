#pragma once

// Gauss rules for s = sum_k c_k z_k with z_k i.i.d. Uniform[-1, 1], built
// from the exact moments of s (Golub-Welsch). Used for reference
// expectations when a case depends on z only through a few such sums.

#include <span>
#include <vector>

namespace kinuq::uq {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // sum to 1
};

// E[s^p] for p = 0 .. max_order.
std::vector<double> uniform_sum_moments(std::span<const double> coeffs, int max_order);

GaussRule uniform_sum_rule(std::span<const double> coeffs, int n_points);

}  // namespace kinuq::uq
