#include "kinuq/bench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>

#include "kinuq/bench/cases.hpp"
#include "kinuq/bench/output.hpp"
#include "kinuq/error.hpp"
#include "kinuq/hash.hpp"
#include "kinuq/uq/metrics.hpp"
#include "kinuq/uq/quadrature.hpp"

namespace kinuq::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_partition(const HybridState& h, int step) {
  const std::size_t n = h.labels.size();
  if (h.update_count.size() != n || h.m.size() != n) {
    throw Error(ErrorKind::InvalidState, "label partition does not cover the grid at step " +
                                             std::to_string(step));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = h.labels.label[i];
    if ((r != Regime::Fluid && r != Regime::Kinetic) || h.update_count[i] != 1) {
      throw Error(ErrorKind::InvalidState,
                  "cell " + std::to_string(i) + " breaks the partition at step " + std::to_string(step));
    }
  }
}

std::shared_ptr<const SpectralKernel> kernel_for(const CaseSetup& cs, const ExperimentConfig& cfg) {
  if (cs.collision == cfg.collision) return cached_kernel(cs.collision, cs.vg);
  // Sample-dependent kernels are not worth caching.
  return std::make_shared<const SpectralKernel>(build_kernel(cs.collision, cs.vg));
}

std::atomic<long long> g_checked_steps{0};

std::uint64_t offset(int repetition) {
  return static_cast<std::uint64_t>(repetition) * uq::streams::kStreamsPerRepetition;
}

}  // namespace

RunResult run_model(const ExperimentConfig& cfg, SolverKind solver, std::span<const double> z,
                    int n_cells) {
  const auto t0 = Clock::now();
  const int n = n_cells > 0 ? n_cells : cfg.nx;
  CaseSetup cs = build_case(cfg, z, n);
  RunResult r;
  r.sg = cs.sg;
  r.steps = cfg.step_count(n);
  r.dt = cfg.step_size(n);
  std::shared_ptr<const SpectralKernel> kernel;
  if (solver != SolverKind::FullFluid) kernel = kernel_for(cs, cfg);
  r.setup_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  const auto nn = static_cast<std::size_t>(n);
  switch (solver) {
    case SolverKind::FullKinetic: {
      DistributionField f = cs.f ? *cs.f : maxwellian(*cs.macro, cs.sg, cs.vg);
      KineticStepConfig kc;
      kc.dt = r.dt;
      for (int s = 0; s < r.steps; ++s) {
        f = ap_step(f, cs.kn, *kernel, kc);
        r.kinetic_fraction.push_back(1.0);
      }
      r.m = moments(f);
      r.labels.label.assign(nn, Regime::Kinetic);
      break;
    }
    case SolverKind::FullFluid: {
      ConservedState s = to_conserved(cs.macro ? *cs.macro : moments(*cs.f));
      for (int k = 0; k < r.steps; ++k) {
        s = euler_step(s, cs.sg, r.dt);
        r.kinetic_fraction.push_back(0.0);
      }
      r.m = to_macro(s);
      r.labels.label.assign(nn, Regime::Fluid);
      break;
    }
    case SolverKind::Hybrid: {
      HybridConfig hc;
      hc.dt = r.dt;
      hc.coeffs = cfg.transport;
      hc.thresholds = cfg.thresholds;
      hc.record_history = cfg.record_history;
      HybridState h = cs.macro ? hybrid_from_macro(*cs.macro, cs.kn, cs.vg, cs.sg)
                               : hybrid_from_distribution(*cs.f, cs.kn, hc);
      for (int k = 0; k < r.steps; ++k) {
        h = hybrid_step(h, *kernel, hc);
        check_partition(h, k + 1);
        ++r.invariant_checks;
        g_checked_steps.fetch_add(1, std::memory_order_relaxed);
        r.kinetic_fraction.push_back(h.labels.fraction(Regime::Kinetic));
      }
      r.m = std::move(h.m);
      r.labels = std::move(h.labels);
      break;
    }
  }
  r.solve_seconds = seconds_since(t1);
  return r;
}

long long checked_hybrid_steps() noexcept { return g_checked_steps.load(); }

uq::FieldSet run_fields(const ExperimentConfig& cfg, SolverKind solver, std::span<const double> z,
                        int n_cells) {
  return uq::FieldSet::from_macro(run_model(cfg, solver, z, n_cells).m);
}

McResult run_mc(const ExperimentConfig& cfg, int samples, int n_cells, std::uint64_t seed,
                int repetition) {
  if (samples < 1) throw Error(ErrorKind::Config, "MC needs at least one sample");
  const std::size_t dim = sample_dimension(cfg.case_id);
  const auto t0 = Clock::now();
  std::vector<uq::FieldSet> out(static_cast<std::size_t>(samples));
  uq::parallel_for(out.size(), cfg.workers, [&](std::size_t i) {
    const auto z = uq::draw_sample(seed, uq::streams::kMonteCarlo + offset(repetition), i, dim);
    out[i] = run_fields(cfg, cfg.solver, z.z, n_cells);
  });
  McResult r;
  r.mean = uq::mc_estimate(out);
  r.variance = uq::FieldSet(r.mean.n_cells());
  for (std::size_t k = 0; k < uq::kNumQuantities; ++k) {
    std::vector<uq::Field> col;
    col.reserve(out.size());
    for (const auto& f : out) col.push_back(f[k]);
    auto v = uq::variance_field_mc(col);
    r.variance[k] = std::move(v.variance);
    r.clipped += v.clipped;
  }
  r.runs = samples;
  r.wall_seconds = seconds_since(t0);
  return r;
}

std::vector<uq::LevelSpec> level_specs(const ExperimentConfig& cfg,
                                       std::span<const LevelPlan> plan) {
  std::vector<uq::LevelSpec> out;
  for (std::size_t l = 0; l < plan.size(); ++l) {
    out.push_back({static_cast<int>(l), plan[l].n_cells, cfg.step_size(plan[l].n_cells),
                   plan[l].samples});
  }
  uq::validate_levels(out);
  return out;
}

MlmcResult run_mlmc(const ExperimentConfig& cfg, std::span<const LevelPlan> plan,
                    std::uint64_t seed, int repetition, bool unit_lambda) {
  MlmcResult r;
  r.levels = level_specs(cfg, plan);
  uq::MlmcOptions opts;
  opts.scalar_lambda = cfg.uq.scalar_lambda;
  opts.unit_lambda = unit_lambda;
  opts.workers = cfg.workers;
  opts.stream_offset = offset(repetition);
  const uq::ModelRunner runner = [&cfg](const uq::RandomSample& z, const uq::LevelSpec& l) {
    return run_fields(cfg, cfg.solver, z.z, l.n_cells);
  };
  std::vector<double> wall;
  std::vector<int> runs;
  r.samples = uq::mlmc_sample(r.levels, runner, sample_dimension(cfg.case_id), seed, opts, &wall,
                              &runs);
  r.estimate = uq::mlmc_combine(r.samples, opts);
  r.estimate.wall_seconds = wall;
  r.estimate.model_runs = runs;
  const auto sq = uq::squared(r.samples);
  const auto est2 = uq::mlmc_combine(sq, opts);
  r.variance = uq::FieldSet(r.estimate.estimate.n_cells());
  for (std::size_t k = 0; k < uq::kNumQuantities; ++k) {
    auto v = uq::variance_field(est2.estimate[k], r.estimate.estimate[k]);
    r.variance[k] = std::move(v.variance);
    r.clipped += v.clipped;
  }
  return r;
}

FidelityResult run_multifidelity(const ExperimentConfig& cfg, uq::FidelityMode mode,
                                 std::uint64_t seed, int repetition) {
  const std::size_t dim = sample_dimension(cfg.case_id);
  if (dim == 0) throw Error(ErrorKind::Config, "multi-fidelity needs a case with random inputs");
  if (cfg.uq.k.empty()) throw Error(ErrorKind::Config, "no basis sizes given");
  const auto t0 = Clock::now();
  const SolverKind low_kind = mode == uq::FidelityMode::Bi ? SolverKind::FullFluid : SolverKind::Hybrid;
  const SolverKind high_kind =
      mode == uq::FidelityMode::Bi ? SolverKind::Hybrid : SolverKind::FullKinetic;

  auto cands = uq::draw_samples(static_cast<std::size_t>(cfg.uq.candidates), dim, seed,
                                uq::streams::kCandidates + offset(repetition));
  const auto held = uq::draw_samples(static_cast<std::size_t>(cfg.uq.held_out), dim, seed,
                                     uq::streams::kHeldOut + offset(repetition));
  const uq::SampleRunner high = [&](const uq::RandomSample& z) {
    return run_fields(cfg, high_kind, z.z);
  };

  FidelityResult r;
  r.mode = mode;
  r.k = cfg.uq.k;
  std::vector<uq::FieldSet> low_c(cands.size());
  uq::parallel_for(cands.size(), cfg.workers,
                   [&](std::size_t i) { low_c[i] = run_fields(cfg, low_kind, cands[i].z); });
  std::vector<uq::FieldSet> low_h(held.size());
  std::vector<uq::FieldSet> high_h(held.size());
  uq::parallel_for(held.size(), cfg.workers, [&](std::size_t i) {
    low_h[i] = run_fields(cfg, low_kind, held[i].z);
    high_h[i] = run_fields(cfg, high_kind, held[i].z);
  });

  uq::BasisOptions opts;
  opts.k = static_cast<std::size_t>(*std::max_element(cfg.uq.k.begin(), cfg.uq.k.end()));
  opts.ridge_factor = cfg.uq.ridge_factor;
  opts.normalize_fields = cfg.uq.normalize_fields;
  opts.workers = cfg.workers;
  const double dx = build_case(cfg).sg.dx();
  const uq::SnapshotBasis full = uq::build_basis(cands, low_c, high, dx, opts, mode);
  r.selected = full.selection.indices;
  r.truncated = full.selection.truncated;
  r.ill_conditioned = full.ill_conditioned;

  for (int k : cfg.uq.k) {
    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(k), full.size());
    const auto b = kk == full.size() ? full : uq::truncate_basis(full, kk, opts);
    std::vector<uq::FieldSet> approx(held.size());
    for (std::size_t i = 0; i < held.size(); ++i) approx[i] = uq::multifidelity_eval(b, low_h[i]);
    r.err.push_back(uq::err_mean_l2(high_h, approx, dx));
  }
  r.err_low = uq::err_mean_l2(high_h, low_h, dx);

  // Reproduction at the nodes, without ridge.
  uq::BasisOptions exact = opts;
  exact.ridge_factor = 0.0;
  const auto b0 = uq::truncate_basis(full, full.size(), exact);
  for (std::size_t j = 0; j < b0.size(); ++j) {
    const auto approx = uq::vectorize(uq::multifidelity_eval(b0, low_c[b0.selection.indices[j]]));
    const Eigen::VectorXd h = b0.high.col(static_cast<Eigen::Index>(j));
    double num = 0.0;
    for (Eigen::Index i = 0; i < h.size(); ++i) {
      num = std::max(num, std::abs(approx[static_cast<std::size_t>(i)] - h[i]));
    }
    r.node_reproduction = std::max(r.node_reproduction, num / std::max(h.cwiseAbs().maxCoeff(), 1e-300));
  }

  std::vector<uq::FieldSet> approx_c(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) approx_c[i] = uq::multifidelity_eval(full, low_c[i]);
  r.mean = uq::mc_estimate(approx_c);
  r.stddev = uq::FieldSet(r.mean.n_cells());
  for (std::size_t q = 0; q < uq::kNumQuantities; ++q) {
    std::vector<uq::Field> col;
    for (const auto& f : approx_c) col.push_back(f[q]);
    auto v = uq::variance_field_mc(col);
    for (double& x : v.variance) x = std::sqrt(x);
    r.stddev[q] = std::move(v.variance);
  }
  r.low_runs = static_cast<int>(cands.size() + held.size());
  r.high_runs = static_cast<int>(full.size() + held.size());
  r.wall_seconds = seconds_since(t0);
  return r;
}

std::string reference_key(const ExperimentConfig& cfg) {
  nlohmann::json p = to_json(cfg);
  // Only what changes the reference solution.
  for (const char* k : {"name", "solver", "estimator", "seed", "workers", "record_history",
                        "paper_scale", "output_dir", "thresholds"}) {
    p.erase(k);
  }
  p["grid"].erase("nx");
  p["uq"] = {{"reference_nx", cfg.uq.reference_nx},
             {"reference_order", cfg.uq.reference_order}};
  p["steps"] = cfg.step_count(cfg.uq.reference_nx);
  p["version"] = kSoftwareVersion;
  Fnv1a h;
  h.add(std::string_view(p.dump()));
  return hex64(h.value());
}

Reference make_reference(const ExperimentConfig& cfg, const std::string& cache_dir_path) {
  Reference ref;
  ref.key = reference_key(cfg);
  const int n = cfg.uq.reference_nx;
  ref.sg = build_case(cfg, {}, n).sg;
  if (!cache_dir_path.empty()) {
    if (auto f = load_cached(cache_dir_path, ref.key)) {
      ref.mean = std::move(*f);
      ref.from_cache = true;
      return ref;
    }
  }

  // Quadrature points in z and their weights.
  std::vector<std::vector<double>> points;
  std::vector<double> weights;
  const int order = cfg.uq.reference_order;
  auto spread = [](double s, std::span<const double> c) {
    // z_k = s / sum c, so that sum c_k z_k = s with every |z_k| <= 1.
    double total = 0.0;
    for (double x : c) total += x;
    return std::vector<double>(c.size(), s / total);
  };
  auto harmonic = [](int d) {
    std::vector<double> c(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) c[static_cast<std::size_t>(k)] = 1.0 / (2.0 * (k + 1));
    return c;
  };
  switch (cfg.case_id) {
    case CaseId::SodUncertain: {
      const auto c = harmonic(5);
      const auto g = uq::uniform_sum_rule(c, order);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        points.push_back(spread(g.nodes[i], c));
        weights.push_back(g.weights[i]);
      }
      break;
    }
    case CaseId::MixedRegimeA:
    case CaseId::MixedRegimeC: {
      const auto c = harmonic(7);
      const auto g = uq::uniform_sum_rule(c, order);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
          auto z = spread(g.nodes[i], c);
          const auto zt = spread(g.nodes[j], c);
          z.insert(z.end(), zt.begin(), zt.end());
          points.push_back(std::move(z));
          weights.push_back(g.weights[i] * g.weights[j]);
        }
      }
      break;
    }
    case CaseId::MixedRegimeB: {
      const double one = 1.0;
      const auto g = uq::uniform_sum_rule(std::span<const double>(&one, 1), order);
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        points.push_back({g.nodes[i]});
        weights.push_back(g.weights[i]);
      }
      break;
    }
    default:
      points.emplace_back();
      weights.push_back(1.0);
  }

  std::vector<uq::FieldSet> runs(points.size());
  uq::parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
    runs[i] = run_fields(cfg, SolverKind::FullKinetic, points[i], n);
  });
  ref.mean = uq::FieldSet(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t k = 0; k < uq::kNumQuantities; ++k) {
      for (std::size_t c = 0; c < ref.mean[k].size(); ++c) ref.mean[k][c] += weights[i] * runs[i][k][c];
    }
  }
  ref.runs = static_cast<int>(runs.size());
  if (!cache_dir_path.empty()) {
    store_cached(cache_dir_path, ref.key, ref.mean,
                 {{"case", to_string(cfg.case_id)}, {"nx", n}, {"points", runs.size()}});
  }
  return ref;
}

double median(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorKind::Config, "median of nothing");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double timing_ratio(std::span<const double> kinetic_seconds, std::span<const double> hybrid_seconds) {
  const double h = median({hybrid_seconds.begin(), hybrid_seconds.end()});
  if (!(h > 0.0)) throw Error(ErrorKind::Config, "hybrid wall time must be > 0");
  return median({kinetic_seconds.begin(), kinetic_seconds.end()}) / h;
}

}  // namespace kinuq::bench
