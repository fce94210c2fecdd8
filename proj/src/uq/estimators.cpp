#include "kinuq/uq/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "kinuq/error.hpp"
#include "kinuq/log.hpp"

namespace kinuq::uq {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
  if (nw <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex mu;
  std::exception_ptr first;
  std::size_t first_index = std::numeric_limits<std::size_t>::max();
  auto body = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < first_index) {
          first_index = i;
          first = std::current_exception();
        }
        stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

Field mc_estimate(std::span<const Field> samples) { return tree_mean(samples); }

FieldSet mc_estimate(std::span<const FieldSet> samples) {
  if (samples.empty()) throw Error(ErrorKind::Config, "mean of zero samples");
  FieldSet out;
  std::vector<const Field*> p(samples.size());
  for (std::size_t k = 0; k < kNumQuantities; ++k) {
    for (std::size_t i = 0; i < samples.size(); ++i) p[i] = &samples[i][k];
    out[k] = tree_mean(std::span<const Field* const>(p));
  }
  return out;
}

namespace {

void check_paired(std::span<const Field> fine, std::span<const Field> coarse) {
  if (fine.size() != coarse.size()) throw Error(ErrorKind::Shape, "unpaired level samples");
  if (fine.size() < 2) throw Error(ErrorKind::Config, "lambda needs at least 2 paired samples");
  const std::size_t n = fine[0].size();
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (fine[i].size() != n || coarse[i].size() != n) {
      throw Error(ErrorKind::Shape, "paired samples live on different grids");
    }
  }
}

// Coarse variance below this fraction of the squared mean is roundoff.
constexpr double kDegenerateVar = 1e-28;

double slope(double sxy, double sxx, double mean_x, std::size_t m, bool& degenerate) {
  const double scale = static_cast<double>(m) * std::max(mean_x * mean_x, 1e-300);
  if (!(sxx > kDegenerateVar * scale)) {
    degenerate = true;
    return 1.0;
  }
  degenerate = false;
  return sxy / sxx;
}

}  // namespace

LambdaResult lambda_coeff(std::span<const Field> fine, std::span<const Field> coarse) {
  check_paired(fine, coarse);
  const Field mf = tree_mean(fine);
  const Field mc = tree_mean(coarse);
  const std::size_t n = mf.size();
  LambdaResult r;
  r.lambda.assign(n, 1.0);
  for (std::size_t c = 0; c < n; ++c) {
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const double dx = coarse[i][c] - mc[c];
      sxy += (fine[i][c] - mf[c]) * dx;
      sxx += dx * dx;
    }
    bool deg = false;
    r.lambda[c] = slope(sxy, sxx, mc[c], fine.size(), deg);
    if (deg) ++r.degenerate_cells;
  }
  return r;
}

LambdaResult lambda_coeff_scalar(std::span<const Field> fine, std::span<const Field> coarse) {
  check_paired(fine, coarse);
  const std::size_t m = fine.size();
  std::vector<double> a(m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    double sa = 0.0;
    double sb = 0.0;
    for (std::size_t c = 0; c < fine[i].size(); ++c) {
      sa += fine[i][c];
      sb += coarse[i][c];
    }
    a[i] = sa / static_cast<double>(fine[i].size());
    b[i] = sb / static_cast<double>(fine[i].size());
  }
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(m);
  mb /= static_cast<double>(m);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxy += (a[i] - ma) * (b[i] - mb);
    sxx += (b[i] - mb) * (b[i] - mb);
  }
  bool deg = false;
  const double lam = slope(sxy, sxx, mb, m, deg);
  LambdaResult r;
  r.lambda.assign(fine[0].size(), lam);
  r.degenerate_cells = deg ? fine[0].size() : 0;
  return r;
}

Field difference_variance(std::span<const Field> fine, std::span<const Field> coarse,
                          const Field& lambda) {
  check_paired(fine, coarse);
  const std::size_t m = fine.size();
  const std::size_t n = fine[0].size();
  if (lambda.size() != n) throw Error(ErrorKind::Shape, "lambda field length mismatch");
  std::vector<Field> d(m, Field(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < n; ++c) d[i][c] = fine[i][c] - lambda[c] * coarse[i][c];
  }
  const Field mean = tree_mean(std::span<const Field>(d));
  Field var(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += (d[i][c] - mean[c]) * (d[i][c] - mean[c]);
    var[c] = s / static_cast<double>(m - 1);
  }
  return var;
}

void validate_levels(std::span<const LevelSpec> levels) {
  if (levels.empty()) throw Error(ErrorKind::Config, "no MLMC levels");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& s = levels[l];
    if (s.n_cells <= 0 || !(s.dt > 0.0) || s.samples <= 0) {
      throw Error(ErrorKind::Config, "level " + std::to_string(l) + " needs n_cells, dt, samples > 0");
    }
    if (l > 0) {
      const auto& p = levels[l - 1];
      if (s.n_cells <= p.n_cells || s.n_cells % p.n_cells != 0) {
        throw Error(ErrorKind::Config, "level " + std::to_string(l) + " mesh (" +
                                           std::to_string(s.n_cells) + ") does not refine level " +
                                           std::to_string(l - 1) + " (" +
                                           std::to_string(p.n_cells) + ")");
      }
      if (s.samples < 2) {
        throw Error(ErrorKind::Config, "level " + std::to_string(l) + " needs at least 2 samples");
      }
    }
  }
}

namespace {

std::vector<Field> column(const std::vector<FieldSet>& s, std::size_t k) {
  std::vector<Field> out;
  out.reserve(s.size());
  for (const auto& f : s) out.push_back(f[k]);
  return out;
}

Field sample_variance(std::span<const Field> x, const Field& mean) {
  Field v(mean.size(), 0.0);
  if (x.size() < 2) return v;
  for (std::size_t c = 0; c < mean.size(); ++c) {
    double s = 0.0;
    for (const auto& f : x) s += (f[c] - mean[c]) * (f[c] - mean[c]);
    v[c] = s / static_cast<double>(x.size() - 1);
  }
  return v;
}

}  // namespace

MlmcEstimate mlmc_combine(std::span<const LevelSamples> levels, const MlmcOptions& opts) {
  if (levels.empty()) throw Error(ErrorKind::Config, "no MLMC levels");
  const std::size_t nl = levels.size();
  if (levels[0].fine.empty()) throw Error(ErrorKind::Config, "level 0 has no samples");
  const std::size_t n = levels[0].fine[0].n_cells();
  for (std::size_t l = 0; l < nl; ++l) {
    for (const auto& f : levels[l].fine) {
      if (f.n_cells() != n) throw Error(ErrorKind::Shape, "level samples not on the coarsest grid");
    }
    if (l > 0 && levels[l].coarse.size() != levels[l].fine.size()) {
      throw Error(ErrorKind::Shape, "level " + std::to_string(l) + " samples are not paired");
    }
  }

  MlmcEstimate est;
  est.lambda.assign(nl, FieldSet(n));
  est.level_mean.assign(nl, FieldSet(n));
  est.level_variance.assign(nl, FieldSet(n));
  est.degenerate.assign(nl, 0);
  est.estimate = FieldSet(n);

  for (std::size_t k = 0; k < kNumQuantities; ++k) {
    // lambda[l] couples levels l and l+1; the last is 1.
    for (std::size_t l = 0; l < nl; ++l) est.lambda[l][k].assign(n, 1.0);
    if (!opts.unit_lambda) {
      for (std::size_t l = 1; l < nl; ++l) {
        const auto fine = column(levels[l].fine, k);
        const auto coarse = column(levels[l].coarse, k);
        LambdaResult r = opts.scalar_lambda ? lambda_coeff_scalar(fine, coarse)
                                            : lambda_coeff(fine, coarse);
        est.lambda[l - 1][k] = std::move(r.lambda);
        est.degenerate[l - 1] += r.degenerate_cells;
      }
    }

    for (std::size_t l = 0; l < nl; ++l) {
      std::vector<Field> d = column(levels[l].fine, k);
      if (l > 0) {
        const Field& lam = est.lambda[l - 1][k];
        for (std::size_t i = 0; i < d.size(); ++i) {
          const Field& c = levels[l].coarse[i][k];
          for (std::size_t j = 0; j < n; ++j) d[i][j] = d[i][j] - lam[j] * c[j];
        }
      }
      est.level_mean[l][k] = tree_mean(std::span<const Field>(d));
      est.level_variance[l][k] = sample_variance(d, est.level_mean[l][k]);
    }

    // P_l = prod_{i >= l} lambda_i, accumulated from the finest level down.
    Field& out = est.estimate[k];
    Field p(n, 1.0);
    for (std::size_t l = nl; l-- > 0;) {
      const Field& lam = est.lambda[l][k];
      for (std::size_t j = 0; j < n; ++j) p[j] *= lam[j];
      const Field& mean = est.level_mean[l][k];
      for (std::size_t j = 0; j < n; ++j) {
        const double term = p[j] * mean[j];
        out[j] = (l == nl - 1) ? term : out[j] + term;
      }
    }
  }
  for (std::size_t l = 0; l < nl; ++l) {
    if (est.degenerate[l] > 0) {
      log::warn("mlmc-degenerate-lambda", std::to_string(est.degenerate[l]) + " cells with zero coarse variance " +
                "between levels " + std::to_string(l) + " and " + std::to_string(l + 1) +
                "; lambda set to 1");
    }
  }
  return est;
}

std::vector<LevelSamples> squared(std::span<const LevelSamples> levels) {
  std::vector<LevelSamples> out(levels.begin(), levels.end());
  auto sq = [](std::vector<FieldSet>& v) {
    for (auto& f : v)
      for (auto& q : f.q)
        for (double& x : q) x = x * x;
  };
  for (auto& l : out) {
    sq(l.fine);
    sq(l.coarse);
  }
  return out;
}

std::vector<LevelSamples> mlmc_sample(std::span<const LevelSpec> levels, const ModelRunner& run,
                                      std::size_t dim, std::uint64_t master_seed,
                                      const MlmcOptions& opts, std::vector<double>* wall,
                                      std::vector<int>* runs) {
  validate_levels(levels);
  const auto n0 = static_cast<std::size_t>(levels[0].n_cells);
  std::vector<LevelSamples> out(levels.size());
  if (wall) wall->assign(levels.size(), 0.0);
  if (runs) runs->assign(levels.size(), 0);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto m = static_cast<std::size_t>(levels[l].samples);
    const std::uint64_t stream =
        streams::kMlmcLevel0 + (opts.share_samples ? 0 : l) + opts.stream_offset;
    auto& ls = out[l];
    ls.fine.assign(m, FieldSet());
    if (l > 0) ls.coarse.assign(m, FieldSet());
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(m, opts.workers, [&](std::size_t i) {
      const RandomSample z = draw_sample(master_seed, stream, i, dim);
      ls.fine[i] = restrict_conservative(run(z, levels[l]), n0);
      if (l > 0) ls.coarse[i] = restrict_conservative(run(z, levels[l - 1]), n0);
    });
    const auto t1 = std::chrono::steady_clock::now();
    if (wall) (*wall)[l] = std::chrono::duration<double>(t1 - t0).count();
    if (runs) (*runs)[l] = static_cast<int>(l > 0 ? 2 * m : m);
  }
  return out;
}

MlmcEstimate mlmc_estimate(std::span<const LevelSpec> levels, const ModelRunner& run,
                           std::size_t dim, std::uint64_t master_seed, const MlmcOptions& opts) {
  std::vector<double> wall;
  std::vector<int> runs;
  const auto samples = mlmc_sample(levels, run, dim, master_seed, opts, &wall, &runs);
  MlmcEstimate est = mlmc_combine(samples, opts);
  est.wall_seconds = std::move(wall);
  est.model_runs = std::move(runs);
  return est;
}

VarianceField variance_field(const Field& mean_of_square, const Field& mean) {
  if (mean_of_square.size() != mean.size()) throw Error(ErrorKind::Shape, "variance inputs differ");
  VarianceField v;
  v.variance.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double x = mean_of_square[i] - mean[i] * mean[i];
    if (x < 0.0) {
      v.variance[i] = 0.0;
      ++v.clipped;
    } else {
      v.variance[i] = x;
    }
  }
  return v;
}

VarianceField variance_field_mc(std::span<const Field> samples) {
  std::vector<Field> sq(samples.begin(), samples.end());
  for (auto& f : sq)
    for (double& x : f) x = x * x;
  return variance_field(tree_mean(std::span<const Field>(sq)), tree_mean(samples));
}

}  // namespace kinuq::uq
