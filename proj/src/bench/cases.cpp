#include "kinuq/bench/cases.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kinuq/error.hpp"

namespace kinuq::bench {

std::size_t sample_dimension(CaseId c) {
  switch (c) {
    case CaseId::SodUncertain: return 5;
    case CaseId::MixedRegimeA:
    case CaseId::MixedRegimeC: return 14;
    case CaseId::MixedRegimeB: return 1;
    default: return 0;
  }
}

double mixed_regime_eps(double x, double eps0) {
  return eps0 + 0.5 * (std::tanh(1.0 - 11.0 * x) + std::tanh(1.0 + 11.0 * x));
}

double perturbation_factor(std::span<const double> z) {
  double s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) s += z[k] / (2.0 * static_cast<double>(k + 1));
  return 1.0 + 0.4 * s;
}

namespace {

struct Domain {
  double x_min;
  double x_max;
  Boundary boundary;
};

Domain domain_of(const ExperimentConfig& c) {
  switch (c.case_id) {
    case CaseId::SodDeterministic:
    case CaseId::SodUncertain: return {0.0, 1.0, Boundary::Specular};
    case CaseId::BlastWave:
    case CaseId::MixedRegimeA:
    case CaseId::MixedRegimeB:
    case CaseId::MixedRegimeC: return {-0.5, 0.5, Boundary::Periodic};
    case CaseId::Custom: return {c.custom.x_min, c.custom.x_max, c.custom.boundary};
  }
  throw Error(ErrorKind::Config, "unknown case");
}

bool is_mixed(CaseId c) {
  return c == CaseId::MixedRegimeA || c == CaseId::MixedRegimeB || c == CaseId::MixedRegimeC;
}

// Double-peak start: rho0/2 [exp(-|v - u0|^2 / T0) + exp(-|v + u0|^2 / T0)].
DistributionField double_peak(const SpatialGrid& sg, const VelocityGrid& vg,
                              std::span<const double> z_rho, std::span<const double> z_t) {
  constexpr double u0x = 0.75;
  constexpr double u0y = -0.75;
  const double a_rho = perturbation_factor(z_rho);
  const double a_t = perturbation_factor(z_t);
  DistributionField f(sg, vg);
  const int n = vg.n();
  for (int c = 0; c < sg.n_cells(); ++c) {
    const double x = sg.center(c);
    const double rho0 = 0.5 * (2.0 + std::sin(2.0 * std::numbers::pi * x)) * a_rho;
    const double t0 = (5.0 + 2.0 * std::cos(2.0 * std::numbers::pi * x)) / 20.0 * a_t;
    auto out = f.cell(c);
    for (int i = 0; i < n; ++i) {
      const double v1 = vg.node(i);
      const double em1 = std::exp(-(v1 - u0x) * (v1 - u0x) / t0);
      const double ep1 = std::exp(-(v1 + u0x) * (v1 + u0x) / t0);
      for (int j = 0; j < n; ++j) {
        const double v2 = vg.node(j);
        const double em2 = std::exp(-(v2 - u0y) * (v2 - u0y) / t0);
        const double ep2 = std::exp(-(v2 + u0y) * (v2 + u0y) / t0);
        out[static_cast<std::size_t>(i) * n + j] = 0.5 * rho0 * (em1 * em2 + ep1 * ep2);
      }
    }
  }
  return f;
}

}  // namespace

CaseSetup build_case(const ExperimentConfig& cfg, std::span<const double> z, int n_cells) {
  cfg.validate();
  const std::size_t dim = sample_dimension(cfg.case_id);
  if (!z.empty() && z.size() != dim) {
    throw Error(ErrorKind::Shape, std::string(to_string(cfg.case_id)) + " takes " +
                                      std::to_string(dim) + " random inputs, got " +
                                      std::to_string(z.size()));
  }
  for (double v : z) {
    if (!(v >= -1.0 && v <= 1.0)) throw Error(ErrorKind::Config, "random input outside [-1, 1]");
  }
  const int n = n_cells > 0 ? n_cells : cfg.nx;
  const Domain d = domain_of(cfg);
  CaseSetup s{SpatialGrid(n, d.x_min, d.x_max, d.boundary), VelocityGrid(cfg.nv, cfg.l_max), {},
              cfg.collision, std::nullopt, std::nullopt};

  const bool profile = is_mixed(cfg.case_id) || cfg.knudsen.kind == KnudsenSpec::Kind::MixedProfile;
  s.kn.eps.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    s.kn.eps[static_cast<std::size_t>(i)] =
        profile ? mixed_regime_eps(s.sg.center(i), cfg.knudsen.eps0) : cfg.knudsen.value;
  }

  MacroState m(static_cast<std::size_t>(n));
  switch (cfg.case_id) {
    case CaseId::SodDeterministic:
    case CaseId::SodUncertain: {
      const double a = z.empty() ? 1.0 : perturbation_factor(z);
      for (int i = 0; i < n; ++i) {
        const bool left = s.sg.center(i) <= 0.5;
        m.set(static_cast<std::size_t>(i), left ? CellMoments{1.0, 0.0, 0.0, a}
                                                : CellMoments{0.125, 0.0, 0.0, 0.25 * a});
      }
      s.macro = std::move(m);
      break;
    }
    case CaseId::BlastWave: {
      for (int i = 0; i < n; ++i) {
        const double x = s.sg.center(i);
        CellMoments c{1.0, 0.0, 0.0, 0.25};
        if (x < -0.3) c = {1.0, 1.0, 0.0, 2.0};
        if (x >= 0.3) c = {1.0, -1.0, 0.0, 2.0};
        m.set(static_cast<std::size_t>(i), c);
      }
      s.macro = std::move(m);
      break;
    }
    case CaseId::MixedRegimeA:
    case CaseId::MixedRegimeC: {
      std::span<const double> zr;
      std::span<const double> zt;
      if (!z.empty()) {
        zr = z.subspan(0, 7);
        zt = z.subspan(7, 7);
      }
      s.f = double_peak(s.sg, s.vg, zr, zt);
      break;
    }
    case CaseId::MixedRegimeB: {
      if (!z.empty()) s.collision.b = cfg.collision.b * (1.0 + 0.5 * z[0]);
      s.f = double_peak(s.sg, s.vg, {}, {});
      break;
    }
    case CaseId::Custom: {
      for (int i = 0; i < n; ++i) {
        const double x = s.sg.center(i);
        const Region* r = &cfg.custom.regions.back();
        for (const auto& g : cfg.custom.regions) {
          if (x <= g.x_end) {
            r = &g;
            break;
          }
        }
        m.set(static_cast<std::size_t>(i), {r->rho, r->ux, r->uy, r->temp});
      }
      s.macro = std::move(m);
      break;
    }
  }
  return s;
}

}  // namespace kinuq::bench
