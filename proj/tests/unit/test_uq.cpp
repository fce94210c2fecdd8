#include <doctest.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <stdexcept>

#include "kinuq/bench/cases.hpp"
#include "kinuq/error.hpp"
#include "kinuq/log.hpp"
#include "kinuq/uq/estimators.hpp"
#include "kinuq/uq/fields.hpp"
#include "kinuq/uq/metrics.hpp"
#include "kinuq/uq/multifidelity.hpp"
#include "kinuq/uq/quadrature.hpp"
#include "kinuq/uq/sampling.hpp"
#include "support/lstsq.hpp"

using namespace kinuq;
using namespace kinuq::uq;

namespace {

bool same_bits(const Field& a, const Field& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Cheap surrogate with a mesh-dependent bias that shrinks as n grows.
FieldSet surrogate(const RandomSample& z, const LevelSpec& lv) {
  const auto n = static_cast<std::size_t>(lv.n_cells);
  FieldSet f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double bias = 1.0 / static_cast<double>(n * n);
    f[0][i] = 1.0 + 0.3 * z.z[0] * std::sin(6.0 * x) + bias;
    f[1][i] = z.z[1] * x + bias * z.z[0];
    f[2][i] = 0.0;
    f[3][i] = 1.0 + 0.2 * z.z[0] * z.z[1] + bias * x;
  }
  return f;
}

std::vector<Field> random_fields(std::size_t m, std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> d;
  std::vector<Field> out(m, Field(n));
  for (auto& f : out)
    for (double& x : f) x = d(g);
  return out;
}

}  // namespace

TEST_CASE("sampling is reproducible and uniform") {
  const auto a = draw_samples(50, 3, 42);
  const auto b = draw_samples(50, 3, 42);
  for (std::size_t i = 0; i < 50; ++i) CHECK(a[i].z == b[i].z);
  CHECK(draw_samples(1, 3, 42, 1)[0].z != a[0].z);
  CHECK(draw_samples(1, 3, 43)[0].z != a[0].z);
  // Sample i does not depend on how many were drawn or in which order.
  CHECK(draw_sample(42, 0, 37, 3).z == a[37].z);

  const auto s = draw_samples(100000, 4, 7);
  for (std::size_t k = 0; k < 4; ++k) {
    double mean = 0.0;
    for (const auto& r : s) {
      CHECK_MESSAGE((r.z[k] >= -1.0 && r.z[k] <= 1.0), "component out of range");
      mean += r.z[k];
    }
    mean /= 1e5;
    CHECK(std::fabs(mean) <= 0.02);
  }
  CHECK(bench::sample_dimension(bench::CaseId::MixedRegimeA) == 14);
}

TEST_CASE("field helpers") {
  const Field fine{1.0, 3.0, 2.0, 6.0, -1.0, 1.0};
  CHECK(restrict_conservative(fine, 3) == Field{2.0, 4.0, 0.0});
  CHECK(restrict_conservative(fine, 6) == fine);
  const Field c = restrict_conservative(fine, 2);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == doctest::Approx(2.0));
  CHECK_THROWS_AS(restrict_conservative(fine, 4), Error);

  FieldSet fs(3);
  for (std::size_t k = 0; k < kNumQuantities; ++k)
    for (std::size_t i = 0; i < 3; ++i) fs[k][i] = static_cast<double>(10 * k + i);
  const Field v = vectorize(fs);
  CHECK(v.size() == 12);
  CHECK(v[4] == 11.0);
  const FieldSet back = unvectorize(v);
  for (std::size_t k = 0; k < kNumQuantities; ++k) CHECK(back[k] == fs[k]);
  CHECK_THROWS_AS(unvectorize(Field(5)), Error);
}

TEST_CASE("tree mean") {
  std::mt19937_64 g(3);
  const auto xs = random_fields(37, 5, g);
  const Field t = tree_mean(xs);
  for (std::size_t c = 0; c < 5; ++c) {
    double s = 0.0;
    for (const auto& x : xs) s += x[c];
    CHECK(t[c] == doctest::Approx(s / 37.0).epsilon(1e-13));
  }
  const std::vector<Field> same(9, Field{0.1, 0.7, -3.3});
  CHECK(same_bits(tree_mean(same), same[0]));
  CHECK_THROWS_AS(tree_mean(std::vector<Field>{}), Error);
  CHECK_THROWS_AS(tree_mean(std::vector<Field>{Field(2), Field(3)}), Error);
}

TEST_CASE("monte carlo estimate") {
  const Field a{1.0, 2.0, 3.0};
  const Field b{3.0, -2.0, 0.5};
  CHECK(mc_estimate(std::vector<Field>{a, a, a}) == a);
  const Field m = mc_estimate(std::vector<Field>{a, b});
  CHECK(m == Field{2.0, 0.0, 1.75});
}

TEST_CASE("monte carlo estimator variance falls like 1/M") {
  // q(z) = z0 + z1^2 has variance 1/3 + 4/45.
  auto estimator_variance = [](std::size_t m) {
    std::vector<double> est;
    for (std::uint64_t j = 0; j < 400; ++j) {
      const auto s = draw_samples(m, 2, 11, 1000 * j);
      std::vector<Field> q;
      for (const auto& r : s) q.push_back({r.z[0] + r.z[1] * r.z[1]});
      est.push_back(mc_estimate(q)[0]);
    }
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / 400.0;
    double v = 0.0;
    for (double e : est) v += (e - mean) * (e - mean);
    return v / 399.0;
  };
  const double v1 = estimator_variance(50);
  const double v4 = estimator_variance(200);
  CAPTURE(v1);
  CAPTURE(v4);
  CHECK(v1 == doctest::Approx((1.0 / 3.0 + 4.0 / 45.0) / 50.0).epsilon(0.2));
  CHECK(v1 / v4 > 3.0);
  CHECK(v1 / v4 < 5.3);
}

TEST_CASE("lambda coefficient") {
  std::mt19937_64 g(5);
  const auto coarse = random_fields(64, 4, g);
  auto twice = coarse;
  for (auto& f : twice)
    for (double& x : f) x *= 2.0;

  const auto same = lambda_coeff(coarse, coarse);
  for (double l : same.lambda) CHECK(l == doctest::Approx(1.0).epsilon(1e-14));
  const auto dbl = lambda_coeff(twice, coarse);
  for (double l : dbl.lambda) CHECK(l == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dbl.degenerate_cells == 0);

  // Independent pairing: the slope is pure noise of size 1/sqrt(M).
  const std::size_t m = 400;
  const auto x = random_fields(m, 6, g);
  auto y = random_fields(m, 6, g);
  const auto ind = lambda_coeff(y, x);
  for (double l : ind.lambda) CHECK(std::fabs(l) <= 3.0 / std::sqrt(static_cast<double>(m)));

  // Hand-computed slope.
  const std::vector<Field> f{{1.0}, {2.0}, {4.0}};
  const std::vector<Field> c{{0.0}, {1.0}, {2.0}};
  CHECK(lambda_coeff(f, c).lambda[0] == doctest::Approx(1.5));
  CHECK(lambda_coeff_scalar(f, c).lambda[0] == doctest::Approx(1.5));

  const std::vector<Field> flat{{2.0}, {2.0}, {2.0}};
  const auto deg = lambda_coeff(f, flat);
  CHECK(deg.lambda[0] == 1.0);
  CHECK(deg.degenerate_cells == 1);

  CHECK_THROWS_AS(lambda_coeff(std::vector<Field>{{1.0}}, std::vector<Field>{{1.0}}), Error);
  CHECK_THROWS_AS(lambda_coeff(f, std::vector<Field>{{1.0}, {2.0}}), Error);
}

TEST_CASE("optimal lambda never increases the difference variance") {
  std::mt19937_64 g(17);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 20; ++trial) {
    const auto coarse = random_fields(30, 8, g);
    std::vector<Field> fine = coarse;
    const double a = 0.5 + 0.1 * trial;
    for (auto& fv : fine)
      for (double& x : fv) x = a * x + 0.3 * d(g);
    const Field lam = lambda_coeff(fine, coarse).lambda;
    const Field with = difference_variance(fine, coarse, lam);
    const Field unit = difference_variance(fine, coarse, Field(8, 1.0));
    for (std::size_t c = 0; c < 8; ++c) CHECK(with[c] <= unit[c] * (1.0 + 1e-12));
  }
}

TEST_CASE("single-level MLMC is bit-identical to MC") {
  const std::vector<LevelSpec> lv{{0, 8, 0.01, 20}};
  const MlmcEstimate est = mlmc_estimate(lv, surrogate, 2, 99);
  std::vector<FieldSet> qs;
  for (const auto& z : draw_samples(20, 2, 99, streams::kMlmcLevel0)) qs.push_back(surrogate(z, lv[0]));
  const FieldSet mc = mc_estimate(qs);
  for (std::size_t k = 0; k < kNumQuantities; ++k) CHECK(same_bits(est.estimate[k], mc[k]));
  CHECK(est.model_runs == std::vector<int>{20});
}

TEST_CASE("unit-lambda MLMC telescopes to the finest level mean") {
  const std::vector<LevelSpec> lv{{0, 4, 0.01, 16}, {1, 8, 0.005, 16}, {2, 16, 0.0025, 16}};
  MlmcOptions opts;
  opts.unit_lambda = true;
  opts.share_samples = true;
  const MlmcEstimate est = mlmc_estimate(lv, surrogate, 2, 5, opts);
  std::vector<FieldSet> finest;
  for (const auto& z : draw_samples(16, 2, 5, streams::kMlmcLevel0)) {
    finest.push_back(restrict_conservative(surrogate(z, lv[2]), 4));
  }
  const FieldSet ref = mc_estimate(finest);
  for (std::size_t k = 0; k < kNumQuantities; ++k)
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::fabs(est.estimate[k][i] - ref[k][i]) <= 1e-12);
}

TEST_CASE("two-level combination matches a direct evaluation") {
  std::mt19937_64 g(23);
  const std::size_t n = 3;
  std::vector<LevelSamples> levels(2);
  for (const auto& f : random_fields(10, n, g)) {
    FieldSet s(n);
    for (auto& q : s.q) q = f;
    levels[0].fine.push_back(s);
  }
  const auto c1 = random_fields(6, n, g);
  const auto noise = random_fields(6, n, g);
  for (std::size_t i = 0; i < 6; ++i) {
    FieldSet cs(n), fs(n);
    for (std::size_t k = 0; k < kNumQuantities; ++k) {
      cs[k] = c1[i];
      for (std::size_t j = 0; j < n; ++j) fs[k][j] = 1.7 * c1[i][j] + 0.2 * noise[i][j];
    }
    levels[1].coarse.push_back(cs);
    levels[1].fine.push_back(fs);
  }
  const MlmcEstimate est = mlmc_combine(levels);
  for (std::size_t j = 0; j < n; ++j) {
    double m0 = 0.0, mf = 0.0, mc = 0.0;
    for (const auto& s : levels[0].fine) m0 += s[0][j] / 10.0;
    for (std::size_t i = 0; i < 6; ++i) {
      mf += levels[1].fine[i][0][j] / 6.0;
      mc += levels[1].coarse[i][0][j] / 6.0;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      sxy += (levels[1].fine[i][0][j] - mf) * (levels[1].coarse[i][0][j] - mc);
      sxx += (levels[1].coarse[i][0][j] - mc) * (levels[1].coarse[i][0][j] - mc);
    }
    const double lam = sxy / sxx;
    CHECK(est.lambda[0][0][j] == doctest::Approx(lam).epsilon(1e-12));
    CHECK(est.lambda[1][0][j] == 1.0);
    CHECK(est.estimate[0][j] == doctest::Approx(lam * m0 + (mf - lam * mc)).epsilon(1e-12));
  }
}

TEST_CASE("level plans") {
  const std::vector<LevelSpec> ratios{{0, 4, 0.01, 64}, {1, 8, 0.005, 16}, {2, 16, 0.0025, 4}};
  const MlmcEstimate est = mlmc_estimate(ratios, surrogate, 2, 1);
  CHECK(est.model_runs == std::vector<int>{64, 32, 8});
  CHECK(est.wall_seconds.size() == 3);
  CHECK(est.lambda.size() == 3);

  CHECK_THROWS_AS(validate_levels(std::vector<LevelSpec>{{0, 4, 0.01, 8}, {1, 6, 0.01, 8}}), Error);
  CHECK_THROWS_AS(validate_levels(std::vector<LevelSpec>{{0, 4, 0.01, 8}, {1, 8, 0.01, 1}}), Error);
  CHECK_THROWS_AS(validate_levels(std::vector<LevelSpec>{}), Error);
  CHECK_NOTHROW(validate_levels(ratios));
}

TEST_CASE("parallel sampling gives the serial result") {
  const std::vector<LevelSpec> lv{{0, 4, 0.01, 24}, {1, 8, 0.005, 12}};
  MlmcOptions par;
  par.workers = 4;
  const MlmcEstimate a = mlmc_estimate(lv, surrogate, 2, 77);
  const MlmcEstimate b = mlmc_estimate(lv, surrogate, 2, 77, par);
  for (std::size_t k = 0; k < kNumQuantities; ++k) CHECK(same_bits(a.estimate[k], b.estimate[k]));
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 31) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail 7");
  }
}

TEST_CASE("degenerate coarse variance falls back to unit lambda and warns") {
  log::reset_counts();
  log::set_quiet(true);
  std::vector<LevelSamples> levels(2);
  FieldSet flat(2);
  for (auto& q : flat.q) q = {1.0, 1.0};
  levels[0].fine = {flat, flat};
  levels[1].coarse = {flat, flat, flat};
  levels[1].fine = {flat, flat, flat};
  levels[1].fine[1][0][0] = 2.0;
  const MlmcEstimate est = mlmc_combine(levels);
  log::set_quiet(false);
  CHECK(est.lambda[0][0][0] == 1.0);
  CHECK(est.degenerate[0] == 8);
  CHECK(log::warning_count("mlmc-degenerate-lambda") == 1);
}

TEST_CASE("variance field") {
  const Field a{1.0, 2.0, -1.0};
  const Field b{3.0, 2.0, 5.0};
  const VarianceField det = variance_field_mc(std::vector<Field>{a, a, a});
  for (double v : det.variance) CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
  const VarianceField two = variance_field_mc(std::vector<Field>{a, b});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(two.variance[i] == doctest::Approx((a[i] - b[i]) * (a[i] - b[i]) / 4.0).epsilon(1e-14));
  }
  const VarianceField clipped = variance_field({0.9, 4.0}, {1.0, 1.0});
  CHECK(clipped.variance == Field{0.0, 3.0});
  CHECK(clipped.clipped == 1);

  const std::vector<LevelSamples> lv{{{FieldSet(1)}, {}}};
  auto sq = squared(lv);
  CHECK(sq[0].fine[0][0][0] == 0.0);
}

TEST_CASE("error metrics") {
  const Field ref{1.0, 2.0, 3.0, 4.0};
  const double dx = 0.25;
  CHECK(err_global(std::vector<Field>{ref, ref}, ref, dx) == 0.0);
  Field off = ref;
  for (double& x : off) x += 0.3;
  CHECK(err_global(std::vector<Field>{off}, ref, dx) == doctest::Approx(0.3));
  for (double e : err_pointwise(std::vector<Field>{off}, ref)) CHECK(e == doctest::Approx(0.3));
  CHECK(err_mean_l2(std::vector<Field>{ref}, std::vector<Field>{ref}, dx) == 0.0);
  CHECK(err_mean_l2(std::vector<Field>{off}, std::vector<Field>{ref}, dx) == doctest::Approx(0.3));
  // Two runs at +-c give c.
  Field minus = ref;
  for (double& x : minus) x -= 0.3;
  CHECK(err_global(std::vector<Field>{off, minus}, ref, dx) == doctest::Approx(0.3));
  // A finer reference is averaged onto the run grid.
  const Field fine{0.5, 1.5, 2.0, 2.0, 2.5, 3.5, 4.0, 4.0};
  CHECK(err_global(std::vector<Field>{ref}, fine, dx) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(err_global(std::vector<Field>{fine}, ref, dx), Error);
  CHECK(l2_norm(Field{3.0, 4.0}, 1.0) == doctest::Approx(5.0));
  CHECK(relative_l2(Field{1.1, 2.2}, Field{1.0, 2.0}) == doctest::Approx(0.1));
}

TEST_CASE("uniform sum moments and gauss rule") {
  // One uniform: 3-point Gauss-Legendre on [-1, 1] with halved weights.
  const std::vector<double> one{1.0};
  const GaussRule r = uniform_sum_rule(one, 3);
  std::vector<double> nodes = r.nodes;
  std::sort(nodes.begin(), nodes.end());
  CHECK(nodes[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-13));
  CHECK(nodes[1] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(nodes[2] == doctest::Approx(std::sqrt(0.6)).epsilon(1e-13));
  double wsum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    wsum += r.weights[i];
    const double expect = std::fabs(r.nodes[i]) < 1e-8 ? 8.0 / 18.0 : 5.0 / 18.0;
    CHECK(r.weights[i] == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));

  // Three uniforms against a tensor Gauss-Legendre oracle (exact for polynomials).
  const std::vector<double> c{0.5, 0.25, 1.0 / 6.0};
  const auto m = uniform_sum_moments(c, 8);
  using GL = boost::math::quadrature::gauss<double, 7>;
  for (int p = 0; p <= 8; ++p) {
    const double ref = GL::integrate([&](double z0) {
      return 0.5 * GL::integrate([&](double z1) {
        return 0.5 * GL::integrate([&](double z2) {
          return 0.5 * std::pow(c[0] * z0 + c[1] * z1 + c[2] * z2, p);
        }, -1.0, 1.0);
      }, -1.0, 1.0);
    }, -1.0, 1.0);
    CAPTURE(p);
    CHECK(m[static_cast<std::size_t>(p)] == doctest::Approx(ref).epsilon(1e-13));
  }
  const GaussRule r4 = uniform_sum_rule(c, 4);
  for (int p = 0; p <= 7; ++p) {
    double q = 0.0;
    for (std::size_t i = 0; i < 4; ++i) q += r4.weights[i] * std::pow(r4.nodes[i], p);
    CHECK(q == doctest::Approx(m[static_cast<std::size_t>(p)]).epsilon(1e-11).scale(1e-3));
  }
  CHECK_THROWS_AS(uniform_sum_rule(c, 0), Error);
}

TEST_CASE("point selection") {
  SUBCASE("orthogonal snapshots come out by decreasing norm") {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(3, 3);
    s(0, 0) = 1.0;
    s(1, 1) = 3.0;
    s(2, 2) = 2.0;
    const Selection sel = select_points(s, 3);
    CHECK(sel.indices == std::vector<std::size_t>{1, 2, 0});
    CHECK_FALSE(sel.truncated);
    CHECK(select_points(2.0 * s, 3).indices == sel.indices);
  }
  SUBCASE("ties go to the lowest index") {
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(4, 4);
    CHECK(select_points(s, 4).indices == std::vector<std::size_t>{0, 1, 2, 3});
  }
  SUBCASE("rank-one set is truncated") {
    log::set_quiet(true);
    Eigen::MatrixXd s(4, 3);
    const Eigen::Vector4d v(1.0, -2.0, 0.5, 3.0);
    s.col(0) = v;
    s.col(1) = 2.0 * v;
    s.col(2) = -0.5 * v;
    const Selection sel = select_points(s, 2);
    log::set_quiet(false);
    CHECK(sel.indices == std::vector<std::size_t>{1});
    CHECK(sel.truncated);
    CHECK(sel.requested == 2);
  }
  SUBCASE("matches greedy gram-schmidt on random snapshots") {
    std::mt19937_64 g(8);
    std::normal_distribution<double> d;
    Eigen::MatrixXd s(30, 12);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = d(g);
    const Selection sel = select_points(s, 6);
    // Oracle: repeatedly take the column with the largest residual after
    // orthogonal projection onto the chosen columns.
    std::vector<std::size_t> chosen;
    Eigen::MatrixXd r = s;
    for (int it = 0; it < 6; ++it) {
      Eigen::Index best = 0;
      r.colwise().squaredNorm().maxCoeff(&best);
      chosen.push_back(static_cast<std::size_t>(best));
      const Eigen::VectorXd q = r.col(best).normalized();
      r -= q * (q.transpose() * r);
    }
    CHECK(sel.indices == chosen);
  }
  CHECK_THROWS_AS(select_points(Eigen::MatrixXd::Identity(2, 2), 0), Error);
}

namespace {

// Smooth parametric family with a 3-dimensional input.
FieldSet family(const RandomSample& z, std::size_t n, double shift) {
  FieldSet f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    f[0][i] = 1.0 + 0.3 * z.z[0] * std::sin(3.0 * x) + shift;
    f[1][i] = z.z[1] * x * x;
    f[2][i] = 0.1 * z.z[2];
    f[3][i] = 1.0 + 0.2 * z.z[0] * z.z[2] * std::cos(x);
  }
  return f;
}

}  // namespace

TEST_CASE("multifidelity basis") {
  const std::size_t n = 10;
  const double dx = 0.1;
  auto low = [&](const RandomSample& z) { return family(z, n, 0.0); };
  auto high = [&](const RandomSample& z) { return family(z, n, 0.05 * z.z[1]); };
  const auto cand = draw_samples(20, 3, 4, streams::kCandidates);
  BasisOptions opts;
  opts.k = 3;
  opts.ridge_factor = 0.0;
  const SnapshotBasis b = build_basis(cand, low, high, dx, opts);
  REQUIRE(b.size() == 3);

  SUBCASE("coefficients match a least-squares oracle") {
    const RandomSample z = draw_sample(4, streams::kHeldOut, 0, 3);
    const Eigen::VectorXd c = fidelity_coeffs(b, z, low);
    const Field u = vectorize(low(z));
    const Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::VectorXd ref = oracle::least_squares(b.low, uv);
    for (Eigen::Index k = 0; k < 3; ++k) CHECK(c[k] == doctest::Approx(ref[k]).epsilon(1e-10).scale(1.0));
    const FieldSet out = multifidelity_eval(b, z, low);
    const Eigen::VectorXd expect = b.high * c;
    const Field o = vectorize(out);
    for (std::size_t i = 0; i < o.size(); ++i) CHECK(o[i] == doctest::Approx(expect[static_cast<Eigen::Index>(i)]));
  }
  SUBCASE("selected points are reproduced") {
    BasisOptions def;
    def.k = 3;
    const SnapshotBasis bd = build_basis(cand, low, high, dx, def);
    for (std::size_t k = 0; k < 3; ++k) {
      const Eigen::VectorXd c = fidelity_coeffs(bd, bd.point(k), low);
      for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(std::fabs(c[j] - (j == static_cast<Eigen::Index>(k) ? 1.0 : 0.0)) <= 1e-8);
      }
      const Field got = vectorize(multifidelity_eval(bd, bd.point(k), low));
      const Field want = vectorize(high(bd.point(k)));
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::fabs(got[i] - want[i]) <= 1e-8);
    }
  }
  SUBCASE("an orthogonal field gets zero coefficients") {
    // Remove the span of the selected snapshots from a vector.
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(4 * n), -1.0, 2.0);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(b.low);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(b.low.rows(), 3);
    v -= q * (q.transpose() * v);
    const FieldSet ortho = unvectorize(Field(v.data(), v.data() + v.size()));
    const Eigen::VectorXd c = fidelity_coeffs(b, ortho);
    CHECK(c.norm() <= 1e-10);
  }
  SUBCASE("a single point scales one snapshot") {
    const SnapshotBasis one = truncate_basis(b, 1, opts);
    const RandomSample z = draw_sample(4, streams::kHeldOut, 3, 3);
    const Eigen::VectorXd c = fidelity_coeffs(one, z, low);
    REQUIRE(c.size() == 1);
    const Field got = vectorize(multifidelity_eval(one, z, low));
    const Field hi0 = vectorize(high(one.point(0)));
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(c[0] * hi0[i]));
    CHECK(one.point(0).index == b.point(0).index);
    CHECK_THROWS_AS(truncate_basis(b, 4, opts), Error);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(fidelity_coeffs(b, draw_sample(4, 300, 0, 2), low), Error);
    CHECK_THROWS_AS(fidelity_coeffs(b, FieldSet(n + 1)), Error);
  }
}
