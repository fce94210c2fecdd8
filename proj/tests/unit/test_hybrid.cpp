#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "kinuq/bench/cases.hpp"
#include "kinuq/error.hpp"
#include "kinuq/hybrid.hpp"

using namespace kinuq;

namespace {

MacroState smooth_state(const SpatialGrid& sg) {
  MacroState m(static_cast<std::size_t>(sg.n_cells()));
  for (int i = 0; i < sg.n_cells(); ++i) {
    const double x = 2.0 * std::numbers::pi * sg.center(i);
    m.set(static_cast<std::size_t>(i),
          {1.0 + 0.2 * std::sin(x), 0.1 * std::sin(x + 0.3), 0.0, 1.0 + 0.1 * std::cos(x)});
  }
  return m;
}

MacroState uniform_state(std::size_t n, CellMoments c) {
  MacroState m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, c);
  return m;
}

DistributionField lifted(const MacroState& m, const SpatialGrid& sg, const VelocityGrid& vg) {
  DistributionField f(sg, vg);
  for (int i = 0; i < sg.n_cells(); ++i) {
    discrete_maxwellian_cell(m.cell(static_cast<std::size_t>(i)), vg, f.cell(i));
  }
  return f;
}

DistributionField double_peak(int nv, int nx) {
  bench::ExperimentConfig cfg;
  cfg.case_id = bench::CaseId::MixedRegimeA;
  cfg.nx = nx;
  cfg.nv = nv;
  return *bench::build_case(cfg).f;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("fluid to kinetic criterion examples") {
  const TransportCoeffs c;
  const CriterionThresholds th;
  CHECK(crit_fluid_to_kinetic_cell(1.0, 1.0, 1.0, 0.02, 0.0, c, th));
  CHECK_FALSE(crit_fluid_to_kinetic_cell(1.0, 1.0, 1e-4, 0.02, 0.0, c, th));
  // Independent evaluation of the two-term expression.
  const double rho = 0.8, temp = 1.3, eps = 0.2, du = -0.01, dT = 2.0;
  const double a = eps * 1.0 / (rho * temp) * du;
  const double b = eps * eps / (rho * rho * temp * temp * temp) * dT * dT;
  CHECK(std::fabs(a + b) > 1e-2);
  CHECK(std::fabs(a) < 1e-2);
  CHECK(crit_fluid_to_kinetic_cell(rho, temp, eps, du, dT, c, th));
  CHECK_FALSE(crit_fluid_to_kinetic_cell(rho, temp, eps, du, dT, c, {1.0, 1e-4}));

  const SpatialGrid sg(10, 0.0, 1.0, Boundary::Periodic);
  const auto flags = crit_fluid_to_kinetic(uniform_state(10, {1.0, 0.3, 0.0, 2.0}),
                                           KnudsenField(10, 1.0), c, th, sg);
  for (auto v : flags) CHECK(v == 0);
}

TEST_CASE("kinetic to fluid criterion examples") {
  const SpatialGrid sg(4, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(32, 8.0);
  const CriterionThresholds th;

  const auto eq = lifted(smooth_state(sg), sg, vg);
  for (auto v : crit_kinetic_to_fluid(eq, th)) CHECK(v == 1);

  const auto dp = double_peak(32, 4);
  for (int i = 0; i < 4; ++i) CHECK(equilibrium_distance(dp.cell(i), vg) > 100.0 * th.delta0);
  for (auto v : crit_kinetic_to_fluid(dp, th)) CHECK(v == 0);

  // The threshold is inclusive.
  const double d = equilibrium_distance(dp.cell(0), vg);
  CHECK(crit_kinetic_to_fluid_cell(dp.cell(0), vg, {1e-2, d}));
  CHECK_FALSE(crit_kinetic_to_fluid_cell(dp.cell(0), vg, {1e-2, std::nextafter(d, 0.0)}));
}

TEST_CASE("thresholds validate") {
  CHECK_NOTHROW(CriterionThresholds{}.validate());
  CHECK_THROWS_AS((CriterionThresholds{-1.0, 1e-4}.validate()), Error);
  CHECK_THROWS_AS((CriterionThresholds{1e-2, -1.0}.validate()), Error);
}

TEST_CASE("lift and project") {
  const SpatialGrid sg(6, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(32, 8.0);
  const MacroState m = smooth_state(sg);
  DistributionField f(sg, vg);
  const std::vector<int> some{1, 4};
  lift(m, f, some);
  for (int i = 0; i < 6; ++i) {
    double mass = 0.0;
    for (double x : f.cell(i)) mass += x;
    if (i == 1 || i == 4) {
      CHECK(mass * vg.cell_weight() ==
            doctest::Approx(m.rho[static_cast<std::size_t>(i)]).epsilon(1e-14));
    } else {
      CHECK(mass == 0.0);
    }
  }
  MacroState back(6);
  project(f, back, some);
  for (int i : some) {
    const auto k = static_cast<std::size_t>(i);
    CHECK(back.rho[k] == doctest::Approx(m.rho[k]).epsilon(1e-12));
    CHECK(back.ux[k] == doctest::Approx(m.ux[k]).epsilon(1e-6));
    CHECK(back.temp[k] == doctest::Approx(m.temp[k]).epsilon(1e-6));
  }
  CHECK(back.rho[0] == 0.0);

  MacroState bad = m;
  bad.temp[2] = 0.0;
  try {
    lift(bad, f, std::vector<int>{2});
    FAIL("expected an invalid state");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidState);
    CHECK(std::string(e.what()).find("cell 2") != std::string::npos);
  }
  DistributionField empty(sg, vg);
  CHECK_THROWS_AS(project(empty, back, std::vector<int>{3}), Error);
}

TEST_CASE("ghost sync") {
  const SpatialGrid sg(8, 0.0, 1.0, Boundary::Specular);
  const VelocityGrid vg(32, 8.0);
  const MacroState m = uniform_state(8, {1.0, 0.2, 0.0, 0.9});

  SUBCASE("all kinetic has no interface") {
    HybridState s = hybrid_from_macro(m, KnudsenField(8, 1.0), vg, sg);
    s.labels.label.assign(8, Regime::Kinetic);
    const GhostReport r = ghost_sync(s);
    CHECK(r.lifted.empty());
    CHECK(r.projected.empty());
  }
  SUBCASE("two cells on each side of one interface") {
    HybridState s = hybrid_from_macro(m, KnudsenField(8, 1.0), vg, sg);
    for (std::size_t i = 4; i < 8; ++i) s.labels.label[i] = Regime::Kinetic;
    const GhostReport r = ghost_sync(s);
    CHECK(r.lifted == std::vector<int>{2, 3});
    CHECK(r.projected == std::vector<int>{4, 5});
  }
  SUBCASE("periodic wrap adds the far side") {
    const SpatialGrid pg(8, 0.0, 1.0, Boundary::Periodic);
    HybridState s = hybrid_from_macro(m, KnudsenField(8, 1.0), vg, pg);
    for (std::size_t i = 4; i < 8; ++i) s.labels.label[i] = Regime::Kinetic;
    const GhostReport r = ghost_sync(s);
    CHECK(r.lifted == std::vector<int>{0, 1, 2, 3});
    CHECK(r.projected == std::vector<int>{4, 5, 6, 7});
  }
  SUBCASE("same equilibrium on both sides round trips") {
    HybridState s = hybrid_from_macro(m, KnudsenField(8, 1.0), vg, sg);
    for (std::size_t i = 4; i < 8; ++i) s.labels.label[i] = Regime::Kinetic;
    const DistributionField before = s.f;
    ghost_sync(s);
    for (int i = 2; i < 6; ++i) {
      const auto a = before.cell(i);
      const auto b = s.f.cell(i);
      for (std::size_t k = 0; k < a.size(); ++k) CHECK(b[k] == doctest::Approx(a[k]).epsilon(1e-12));
      const auto c = static_cast<std::size_t>(i);
      CHECK(s.m.rho[c] == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(s.m.ux[c] == doctest::Approx(0.2).epsilon(1e-6));
      CHECK(s.m.temp[c] == doctest::Approx(0.9).epsilon(1e-6));
    }
  }
}

TEST_CASE("initial labels from a distribution") {
  const SpatialGrid sg(4, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(32, 8.0);
  HybridConfig cfg;
  const auto eq = lifted(uniform_state(4, {1.0, 0.0, 0.0, 1.0}), sg, vg);
  const HybridState a = hybrid_from_distribution(eq, KnudsenField(4, 1e-6), cfg);
  CHECK(a.labels.count(Regime::Fluid) == 4);
  const HybridState b = hybrid_from_distribution(double_peak(32, 4), KnudsenField(4, 1e-6), cfg);
  CHECK(b.labels.count(Regime::Kinetic) == 4);
  CHECK_THROWS_AS(hybrid_from_distribution(eq, KnudsenField(3, 1e-6), cfg), Error);
}

TEST_CASE("uniform all-fluid step equals the euler step bitwise") {
  const SpatialGrid sg(16, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(16, 8.0);
  const auto kernel = build_kernel({}, vg);
  const MacroState m = uniform_state(16, {1.0, 0.4, 0.1, 1.2});
  HybridState s = hybrid_from_macro(m, KnudsenField(16, 1e-4), vg, sg);
  HybridConfig cfg;
  cfg.dt = 0.02;
  ConservedState ref = to_conserved(m);
  for (int k = 0; k < 3; ++k) {
    s = hybrid_step(s, kernel, cfg);
    ref = euler_step(ref, sg, cfg.dt);
    CHECK(s.labels.count(Regime::Fluid) == 16);
  }
  const MacroState r = to_macro(ref);
  CHECK(same_bits(s.m.rho, r.rho));
  CHECK(same_bits(s.m.ux, r.ux));
  CHECK(same_bits(s.m.uy, r.uy));
  CHECK(same_bits(s.m.temp, r.temp));
}

TEST_CASE("disabled criteria reduce the hybrid to the euler solver") {
  const SpatialGrid sg(20, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(16, 8.0);
  const auto kernel = build_kernel({}, vg);
  const MacroState m = smooth_state(sg);
  HybridState s = hybrid_from_macro(m, KnudsenField(20, 1.0), vg, sg);
  HybridConfig cfg;
  cfg.dt = 0.01;
  cfg.thresholds = {std::numeric_limits<double>::infinity(), 0.0};
  ConservedState ref = euler_step(to_conserved(m), sg, cfg.dt);
  s = hybrid_step(s, kernel, cfg);
  {
    const MacroState r = to_macro(ref);
    CHECK(same_bits(s.m.rho, r.rho));
    CHECK(same_bits(s.m.ux, r.ux));
    CHECK(same_bits(s.m.temp, r.temp));
  }
  // Later steps pass through the primitive state once per step, so only
  // round-off separates the two runs.
  for (int k = 0; k < 4; ++k) {
    s = hybrid_step(s, kernel, cfg);
    ref = euler_step(ref, sg, cfg.dt);
  }
  CHECK(s.labels.count(Regime::Fluid) == 20);
  const MacroState r = to_macro(ref);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(s.m.rho[i] == doctest::Approx(r.rho[i]).epsilon(1e-13));
    CHECK(s.m.temp[i] == doctest::Approx(r.temp[i]).epsilon(1e-13));
  }
}

TEST_CASE("forcing every cell kinetic reduces the hybrid to the ap step") {
  const SpatialGrid sg(20, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(16, 8.0);
  const auto kernel = build_kernel({}, vg);
  const MacroState m = smooth_state(sg);
  const KnudsenField kn(20, 1e-2);
  HybridState s = hybrid_from_macro(m, kn, vg, sg);
  HybridConfig cfg;
  cfg.dt = 0.005;
  cfg.thresholds = {0.0, 0.0};
  s = hybrid_step(s, kernel, cfg);
  REQUIRE(s.labels.count(Regime::Kinetic) == 20);

  KineticStepConfig kc;
  kc.dt = cfg.dt;
  const DistributionField ref = ap_step(lifted(m, sg, vg), kn, kernel, kc);
  const MacroState rm = moments(ref);
  CHECK(same_bits(s.m.rho, rm.rho));
  CHECK(same_bits(s.m.ux, rm.ux));
  CHECK(same_bits(s.m.temp, rm.temp));
}

TEST_CASE("far from equilibrium every cell is advanced kinetically") {
  const auto dp = double_peak(32, 8);
  const VelocityGrid& vg = dp.velocity();
  const auto kernel = build_kernel({}, vg);
  const KnudsenField kn(8, 1.0);
  HybridConfig cfg;
  cfg.dt = 0.005;
  const HybridState s0 = hybrid_from_distribution(dp, kn, cfg);
  const HybridState s1 = hybrid_step(s0, kernel, cfg);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(s1.advanced_by[i] == Regime::Kinetic);
    CHECK(s1.update_count[i] == 1);
  }
  KineticStepConfig kc;
  kc.dt = cfg.dt;
  const MacroState rm = moments(ap_step(dp, kn, kernel, kc));
  CHECK(same_bits(s1.m.rho, rm.rho));
  CHECK(same_bits(s1.m.temp, rm.temp));
}

TEST_CASE("near-equilibrium small knudsen start stays fluid") {
  const SpatialGrid sg(20, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(32, 8.0);
  const auto kernel = build_kernel({}, vg);
  HybridConfig cfg;
  cfg.dt = 0.005;
  const HybridState s0 =
      hybrid_from_distribution(lifted(smooth_state(sg), sg, vg), KnudsenField(20, 1e-6), cfg);
  CHECK(s0.labels.count(Regime::Fluid) == 20);
  const HybridState s1 = hybrid_step(s0, kernel, cfg);
  CHECK(s1.labels.count(Regime::Fluid) == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(s1.advanced_by[i] == Regime::Fluid);
}

TEST_CASE("mixed steps keep the partition and authoritative state invariants") {
  const SpatialGrid sg(24, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(16, 8.0);
  const auto kernel = build_kernel({}, vg);
  std::vector<double> eps(24);
  for (int i = 0; i < 24; ++i) eps[static_cast<std::size_t>(i)] = i < 12 ? 1e-5 : 0.5;
  HybridState s = hybrid_from_macro(smooth_state(sg), KnudsenField(eps), vg, sg);
  HybridConfig cfg;
  cfg.dt = 0.004;
  cfg.record_history = true;
  for (int k = 0; k < 5; ++k) {
    const auto before = s.labels.label;
    s = hybrid_step(s, kernel, cfg);
    CAPTURE(k);
    CHECK(s.step == k + 1);
    for (std::size_t i = 0; i < 24; ++i) {
      CHECK(s.update_count[i] == 1);
      if (s.labels.label[i] == Regime::Kinetic) {
        const CellMoments c = cell_moments(s.f.cell(static_cast<int>(i)), vg);
        CHECK(std::fabs(c.rho - s.m.rho[i]) <= 1e-12);
        CHECK(std::fabs(c.temp - s.m.temp[i]) <= 1e-12);
      }
      // A cell lifted in phase (a) is still kinetic at the end of the step.
      if (before[i] == Regime::Fluid && s.advanced_by[i] == Regime::Kinetic) {
        CHECK(s.labels.label[i] == Regime::Kinetic);
      }
    }
  }
  const std::size_t k_cells = s.labels.count(Regime::Kinetic);
  CHECK(k_cells > 0);
  CHECK(k_cells < 24);
  CHECK(s.labels.fraction(Regime::Kinetic) == doctest::Approx(static_cast<double>(k_cells) / 24.0));

  std::ostringstream csv;
  write_label_history(csv, s.labels);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "step,cell,label");
  int rows = 0;
  std::string last;
  while (std::getline(in, line)) {
    ++rows;
    last = line;
  }
  CHECK(rows == 5 * 24);
  CHECK(last == "5,23," + std::to_string(static_cast<int>(s.labels.label[23])));
}

TEST_CASE("moved-in cells are not sent back in the same step") {
  const SpatialGrid sg(20, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(16, 8.0);
  const auto kernel = build_kernel({}, vg);
  HybridState s = hybrid_from_macro(smooth_state(sg), KnudsenField(20, 1.0), vg, sg);
  HybridConfig cfg;
  cfg.dt = 0.005;
  cfg.thresholds = {1e-3, 10.0};  // every kinetic cell passes the equilibrium test
  const HybridState s1 = hybrid_step(s, kernel, cfg);
  std::size_t moved = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    if (s1.advanced_by[i] == Regime::Kinetic) {
      ++moved;
      CHECK(s1.labels.label[i] == Regime::Kinetic);
    }
  }
  CHECK(moved > 0);
}

TEST_CASE("solver errors carry the regime") {
  const SpatialGrid sg(10, 0.0, 1.0, Boundary::Periodic);
  const VelocityGrid vg(16, 8.0);
  const auto kernel = build_kernel({}, vg);
  HybridState s = hybrid_from_macro(uniform_state(10, {1.0, 0.0, 0.0, 1.0}), KnudsenField(10, 1e-4),
                                    vg, sg);
  HybridConfig cfg;
  cfg.dt = 0.5;
  try {
    hybrid_step(s, kernel, cfg);
    FAIL("expected a stability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Stability);
    CHECK(std::string(e.what()).find("fluid regime") != std::string::npos);
  }
  s.labels.label.assign(10, Regime::Kinetic);
  try {
    hybrid_step(s, kernel, cfg);
    FAIL("expected a stability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Stability);
    CHECK(std::string(e.what()).find("kinetic regime") != std::string::npos);
  }
}
