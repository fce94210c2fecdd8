#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "kinuq/simd/kernels.hpp"

using namespace kinuq::simd;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& g, double lo = -1.0,
                               double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(g);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

// Lengths straddling the 4-wide vector body and its remainder.
const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 63, 64, 1024, 1031};

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(scalar_kernels().isa == Isa::Scalar);
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(isa_name(Isa::Avx2) == "avx2");
}

TEST_CASE("select_isa falls back to scalar when avx2 is missing") {
  const Isa got = select_isa(Isa::Avx2);
  CHECK(got == (avx2_supported() ? Isa::Avx2 : Isa::Scalar));
  CHECK(kernels().isa == got);
  CHECK(select_isa(Isa::Scalar) == Isa::Scalar);
  CHECK(kernels().isa == Isa::Scalar);
  select_isa(Isa::Avx2);
}

TEST_CASE("avx2 kernels are bitwise equal to the scalar reference") {
  if (!avx2_supported()) {
    MESSAGE("AVX2 not supported on this host; equivalence not exercised");
    return;
  }
  const KernelTable& s = scalar_kernels();
  const KernelTable& v = avx2_kernels();
  std::mt19937_64 g(12345);

  for (std::size_t n : kLengths) {
    CAPTURE(n);
    auto a = random_vec(n, g);
    auto b = random_vec(n, g);
    auto c = random_vec(n, g);
    auto d = random_vec(n, g);
    auto e = random_vec(n, g);

    {  // mul
      std::vector<double> o1(n), o2(n);
      s.mul(a.data(), b.data(), o1.data(), n);
      v.mul(a.data(), b.data(), o2.data(), n);
      CHECK(bitwise_equal(o1, o2));
    }
    {  // accumulate_product
      auto acc1 = c;
      auto acc2 = c;
      s.accumulate_product(0.37, a.data(), b.data(), acc1.data(), n);
      v.accumulate_product(0.37, a.data(), b.data(), acc2.data(), n);
      CHECK(bitwise_equal(acc1, acc2));
    }
    {  // muscl_flux
      auto speed = random_vec(n, g, -8.0, 8.0);
      std::vector<double> courant(n);
      for (std::size_t i = 0; i < n; ++i) courant[i] = speed[i] * 0.0008 / 0.01;
      std::vector<double> o1(n), o2(n);
      s.muscl_flux(a.data(), b.data(), c.data(), d.data(), speed.data(), courant.data(),
                   o1.data(), n);
      v.muscl_flux(a.data(), b.data(), c.data(), d.data(), speed.data(), courant.data(),
                   o2.data(), n);
      CHECK(bitwise_equal(o1, o2));
    }
    {  // flux_update
      std::vector<double> o1(n), o2(n);
      s.flux_update(a.data(), b.data(), c.data(), 0.08, o1.data(), n);
      v.flux_update(a.data(), b.data(), c.data(), 0.08, o2.data(), n);
      CHECK(bitwise_equal(o1, o2));
    }
    {  // imex_combine
      std::vector<double> o1(n), o2(n);
      for (double av : {0.0, 0.016, 8.0, 1e6}) {
        s.imex_combine(a.data(), b.data(), c.data(), d.data(), e.data(), av, 2.0, o1.data(), n);
        v.imex_combine(a.data(), b.data(), c.data(), d.data(), e.data(), av, 2.0, o2.data(), n);
        CHECK(bitwise_equal(o1, o2));
      }
    }
    {  // reductions
      CHECK(bitwise_equal(s.abs_diff_sum(a.data(), b.data(), n),
                          v.abs_diff_sum(a.data(), b.data(), n)));
      const Sums3 r1 = s.first_moments(a.data(), b.data(), c.data(), n);
      const Sums3 r2 = v.first_moments(a.data(), b.data(), c.data(), n);
      CHECK(bitwise_equal(r1.s0, r2.s0));
      CHECK(bitwise_equal(r1.s1, r2.s1));
      CHECK(bitwise_equal(r1.s2, r2.s2));
      CHECK(bitwise_equal(s.centered_energy(a.data(), b.data(), c.data(), 0.3, -0.2, n),
                          v.centered_energy(a.data(), b.data(), c.data(), 0.3, -0.2, n)));
    }
  }
}

TEST_CASE("scalar kernels compute the documented expressions") {
  const KernelTable& s = scalar_kernels();
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
  const std::vector<double> b{2.0, 0.5, -1.0, 0.0, 2.0};
  std::vector<double> out(5);
  s.mul(a.data(), b.data(), out.data(), 5);
  CHECK(out == std::vector<double>{2.0, 1.0, -3.0, 0.0, 10.0});

  std::vector<double> acc(5, 1.0);
  s.accumulate_product(2.0, a.data(), b.data(), acc.data(), 5);
  CHECK(acc == std::vector<double>{5.0, 3.0, -5.0, 1.0, 21.0});

  CHECK(s.abs_diff_sum(a.data(), b.data(), 5) == doctest::Approx(1.0 + 1.5 + 4.0 + 4.0 + 3.0));

  const Sums3 m = s.first_moments(a.data(), b.data(), a.data(), 5);
  CHECK(m.s0 == 15.0);
  CHECK(m.s1 == doctest::Approx(2.0 + 1.0 - 3.0 + 0.0 + 10.0));
  CHECK(m.s2 == doctest::Approx(1.0 + 4.0 + 9.0 + 16.0 + 25.0));

  // a = 0 returns f* exactly.
  s.imex_combine(a.data(), b.data(), b.data(), b.data(), b.data(), 0.0, 2.0, out.data(), 5);
  CHECK(out == a);
}
