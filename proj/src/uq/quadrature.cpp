#include "kinuq/uq/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "kinuq/error.hpp"

namespace kinuq::uq {

std::vector<double> uniform_sum_moments(std::span<const double> coeffs, int max_order) {
  const auto np = static_cast<std::size_t>(max_order) + 1;
  std::vector<double> m(np, 0.0);
  m[0] = 1.0;
  // Binomial table for the convolution of moment sequences.
  std::vector<std::vector<double>> binom(np, std::vector<double>(np, 0.0));
  for (std::size_t p = 0; p < np; ++p) {
    binom[p][0] = 1.0;
    for (std::size_t j = 1; j <= p; ++j) binom[p][j] = binom[p - 1][j - 1] + (j < p ? binom[p - 1][j] : 0.0);
  }
  for (double c : coeffs) {
    std::vector<double> mz(np, 0.0);
    for (std::size_t p = 0; p < np; p += 2) mz[p] = std::pow(c, static_cast<double>(p)) / static_cast<double>(p + 1);
    std::vector<double> next(np, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t j = 0; j <= p; ++j) next[p] += binom[p][j] * m[j] * mz[p - j];
    }
    m = std::move(next);
  }
  return m;
}

GaussRule uniform_sum_rule(std::span<const double> coeffs, int n_points) {
  if (n_points < 1) throw Error(ErrorKind::Config, "Gauss rule needs at least one point");
  if (coeffs.empty()) return {{0.0}, {1.0}};
  const int n = n_points;
  const auto m = uniform_sum_moments(coeffs, 2 * n);
  Eigen::MatrixXd h(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) h(i, j) = m[static_cast<std::size_t>(i + j)];
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NumericBreakdown, "moment matrix not positive definite");
  }
  const Eigen::MatrixXd r = llt.matrixU();
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double prev = j > 0 ? r(j - 1, j) / r(j - 1, j - 1) : 0.0;
    jac(j, j) = r(j, j + 1) / r(j, j) - prev;
    if (j + 1 < n) {
      const double b = r(j + 1, j + 1) / r(j, j);
      jac(j, j + 1) = b;
      jac(j + 1, j) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule g;
  for (int i = 0; i < n; ++i) {
    g.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    g.weights.push_back(m[0] * v * v);
  }
  return g;
}

}  // namespace kinuq::uq
