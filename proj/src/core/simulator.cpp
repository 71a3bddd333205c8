#include "catre/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <thread>

#include "catre/error.hpp"

namespace catre {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(splitmix64(seed) ^ index); }

namespace {

// All randomness of one path. It depends on the seed only, so different
// strategies replayed on the same noise see common random numbers.
struct PathNoise {
  std::size_t family = 0;
  std::vector<double> jump_times, claims, drops;
  std::vector<double> grid;     // interval endpoints after t0, claim times included
  std::vector<int> jump_at;     // index into jump_times, or -1
  std::vector<double> normals;  // one per interval
};

PathNoise draw_noise(const ModelParams& params, const ClaimMixture& mixture, const FilterState& prior,
                     std::uint64_t seed, int steps_per_year, double t0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  PathNoise n;

  const double u = unif(rng);
  double acc = 0.0;
  n.family = prior.size() - 1;
  for (std::size_t k = 0; k < prior.size(); ++k) {
    acc += prior[k];
    if (u < acc) {
      n.family = k;
      break;
    }
  }
  while (prior[n.family] <= 0.0 && n.family > 0) --n.family;
  const ClaimFamily& fam = mixture[n.family];

  const double T = params.horizon;
  if (params.lambda > 0.0) {
    std::exponential_distribution<double> gap(params.lambda);
    for (double t = t0 + gap(rng); t < T; t += gap(rng)) {
      n.jump_times.push_back(t);
      n.claims.push_back(fam.quantile(unif(rng)));
      n.drops.push_back(params.jump.quantile(unif(rng)));
    }
  }

  const int steps = std::max(1, static_cast<int>(std::ceil((T - t0) * steps_per_year - 1e-9)));
  std::size_t j = 0;
  for (int k = 1; k <= steps; ++k) {
    const double e = (k == steps) ? T : t0 + (T - t0) * k / steps;
    while (j < n.jump_times.size() && n.jump_times[j] < e) {
      n.grid.push_back(n.jump_times[j]);
      n.jump_at.push_back(static_cast<int>(j++));
    }
    n.grid.push_back(e);
    // A claim falling exactly on a grid node is attached to that node.
    n.jump_at.push_back(j < n.jump_times.size() && n.jump_times[j] == e ? static_cast<int>(j++) : -1);
  }
  n.normals.resize(n.grid.size());
  for (double& z : n.normals) z = normal(rng);
  return n;
}

class PathRunner {
 public:
  PathRunner(const ModelParams& params, const ClaimMixture& mixture) : p_(params), mixture_(mixture) {}

  // Terminal wealth; fills `rec` when given.
  double run(const PathNoise& noise, const FilterState& start, const FeedbackStrategy& strategy, double t0, double x0,
             double sign, PathRecord* rec) const {
    FilterState filter = start;
    double x = x0;
    double s = t0;
    if (rec) {
      rec->family = noise.family;
      rec->times.push_back(t0);
      rec->wealth.push_back(x0);
      rec->filter.push_back(filter);
      rec->brownian_increments.push_back(0.0);
      rec->controls.push_back(strategy(t0, filter));
    }
    for (std::size_t k = 0; k < noise.grid.size(); ++k) {
      const double e = noise.grid[k];
      const double h = e - s;
      const StrategyPoint z = strategy(s, filter);
      const double drift = p_.excess_return() * z.xi + net_income_rate(p_, z.b);
      double dw;
      if (p_.r == 0.0) {
        dw = std::sqrt(h) * sign * noise.normals[k];
        x += drift * h + z.xi * p_.sigma * dw;
      } else {
        const double growth = std::exp(p_.r * h);
        dw = std::sqrt(std::expm1(2.0 * p_.r * h) / (2.0 * p_.r)) * sign * noise.normals[k];
        x = x * growth + drift * std::expm1(p_.r * h) / p_.r + z.xi * p_.sigma * dw;
      }
      if (noise.jump_at[k] >= 0) {
        const std::size_t j = static_cast<std::size_t>(noise.jump_at[k]);
        const double y = noise.claims[j];
        const StrategyPoint zj = strategy(e, filter);
        const double before = x;
        x -= zj.b * y + (y > p_.dependence_threshold ? zj.xi * noise.drops[j] : 0.0);
        filter = jump_update(filter, y, mixture_);
        if (rec) {
          rec->jump_times.push_back(noise.jump_times[j]);
          rec->claims.push_back(y);
          rec->drops.push_back(noise.drops[j]);
          rec->wealth_before_jump.push_back(before);
          rec->wealth_after_jump.push_back(x);
          rec->jump_controls.push_back(zj);
        }
      }
      if (rec) {
        rec->times.push_back(e);
        rec->brownian_increments.push_back(dw);
        rec->wealth.push_back(x);
        rec->filter.push_back(filter);
        rec->controls.push_back(z);
      }
      s = e;
    }
    return x;
  }

 private:
  const ModelParams& p_;
  const ClaimMixture& mixture_;
};

void check_inputs(const ModelParams& params, const ClaimMixture& mixture, const FilterState& p,
                  std::size_t n_paths, const SimulationOptions& options) {
  validate(params);
  if (p.size() != mixture.size()) throw InvalidArgument("prior dimension does not match the claim mixture");
  if (n_paths < 2) throw InvalidArgument("at least two paths are needed for an estimate");
  if (options.steps_per_year < 1) throw InvalidArgument("steps_per_year must be at least 1");
  if (options.batch_size < 1) throw InvalidArgument("batch_size must be at least 1");
  if (options.antithetic && n_paths % 2 != 0) throw InvalidArgument("antithetic sampling needs an even path count");
}

// Runs `samples` independent draws; sample i evaluates all strategies on the
// noise of path index i (and its antithetic mirror). Per-batch statistics are
// merged in batch order so the result does not depend on the thread count.
PairedEstimate run_estimates(const ModelParams& params, const ClaimMixture& mixture, const FilterState& start,
                             const std::vector<FeedbackStrategy>& strategies, std::size_t n_paths,
                             std::uint64_t seed, const SimulationOptions& options, double t0, double x0,
                             const std::function<double(double)>& payoff) {
  const std::size_t ns = strategies.size();
  const std::size_t samples = options.antithetic ? n_paths / 2 : n_paths;
  const std::size_t nbatch = (samples + options.batch_size - 1) / options.batch_size;
  // Per batch: stats of each strategy, then of each difference.
  std::vector<std::vector<RunningStats>> batch(nbatch, std::vector<RunningStats>(2 * ns));
  const PathRunner runner(params, mixture);

  auto work = [&](std::size_t b) {
    std::vector<double> value(ns);
    const std::size_t lo = b * options.batch_size, hi = std::min(samples, lo + options.batch_size);
    for (std::size_t i = lo; i < hi; ++i) {
      const PathNoise noise = draw_noise(params, mixture, start, path_seed(seed, i), options.steps_per_year, t0);
      for (std::size_t k = 0; k < ns; ++k) {
        double v = payoff(runner.run(noise, start, strategies[k], t0, x0, 1.0, nullptr));
        if (options.antithetic) v = 0.5 * (v + payoff(runner.run(noise, start, strategies[k], t0, x0, -1.0, nullptr)));
        value[k] = v;
        batch[b][k].add(v);
      }
      for (std::size_t k = 0; k < ns; ++k) batch[b][ns + k].add(value[k] - value[0]);
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(options.threads, nbatch));
  if (workers == 1) {
    for (std::size_t b = 0; b < nbatch; ++b) work(b);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t b = w; b < nbatch; b += workers) work(b);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<RunningStats> total(2 * ns);
  for (const auto& bs : batch)
    for (std::size_t k = 0; k < 2 * ns; ++k) total[k].merge(bs[k]);
  auto to_estimate = [&](const RunningStats& s) {
    return UtilityEstimate{s.mean, std::sqrt(s.variance() / static_cast<double>(s.n)), n_paths, seed};
  };
  PairedEstimate out;
  for (std::size_t k = 0; k < ns; ++k) {
    out.utilities.push_back(to_estimate(total[k]));
    out.differences.push_back(to_estimate(total[ns + k]));
  }
  return out;
}

}  // namespace

FeedbackStrategy constant_strategy(StrategyPoint z) {
  return [z](double, const FilterState&) { return z; };
}

void RunningStats::add(double x) {
  ++n;
  const double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void RunningStats::merge(const RunningStats& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
  const double d = o.mean - mean;
  const double nt = na + nb;
  mean += d * nb / nt;
  m2 += o.m2 + d * d * na * nb / nt;
  n += o.n;
}

PathRecord simulate_path(const ModelParams& params, const ClaimMixture& mixture, const FilterState& prior,
                         const FeedbackStrategy& strategy, std::uint64_t seed, const SimulationOptions& options,
                         double t0, double x0) {
  validate(params);
  if (prior.size() != mixture.size()) throw InvalidArgument("prior dimension does not match the claim mixture");
  if (!(t0 >= 0.0 && t0 <= params.horizon)) throw InvalidArgument("start time must lie in [0, T]");
  if (x0 < 0.0) x0 = params.x0;
  const PathNoise noise = draw_noise(params, mixture, prior, seed, options.steps_per_year, t0);
  PathRecord rec;
  PathRunner(params, mixture).run(noise, prior, strategy, t0, x0, 1.0, &rec);
  return rec;
}

void write_path_csv(const PathRecord& path, const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw IoError("cannot write path to '" + filename + "'");
  const std::size_t m = path.filter.empty() ? 0 : path.filter.front().size();
  out << "t,X";
  for (std::size_t j = 0; j < m; ++j) out << ",p_" << j + 1;
  out << ",xi,b\n" << std::setprecision(12);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    out << path.times[k] << ',' << path.wealth[k];
    for (std::size_t j = 0; j < m; ++j) out << ',' << path.filter[k][j];
    out << ',' << path.controls[k].xi << ',' << path.controls[k].b << '\n';
  }
}

UtilityEstimate estimate_utility(const ModelParams& params, const ClaimMixture& mixture, const FilterState& prior,
                                 const FeedbackStrategy& strategy, std::size_t n_paths, std::uint64_t seed,
                                 const SimulationOptions& options) {
  return estimate_utility_paired(params, mixture, prior, {strategy}, n_paths, seed, options).utilities.front();
}

PairedEstimate estimate_utility_paired(const ModelParams& params, const ClaimMixture& mixture,
                                       const FilterState& prior, const std::vector<FeedbackStrategy>& strategies,
                                       std::size_t n_paths, std::uint64_t seed, const SimulationOptions& options) {
  check_inputs(params, mixture, prior, n_paths, options);
  if (strategies.empty()) throw InvalidArgument("no strategy to evaluate");
  const double alpha = params.alpha;
  return run_estimates(params, mixture, prior, strategies, n_paths, seed, options, 0.0, params.x0,
                       [alpha](double x) { return -std::exp(-alpha * x); });
}

UtilityEstimate estimate_g(const ModelParams& params, const ClaimMixture& mixture, const FeedbackStrategy& strategy,
                           double t, const FilterState& p, std::size_t n_paths, std::uint64_t seed,
                           const SimulationOptions& options) {
  check_inputs(params, mixture, p, n_paths, options);
  if (!(t >= 0.0 && t <= params.horizon)) throw InvalidArgument("start time must lie in [0, T]");
  if (t == params.horizon) return {1.0, 0.0, n_paths, seed};
  // Started from x = 0 the exponent is -alpha X_T.
  const double alpha = params.alpha;
  return run_estimates(params, mixture, p, {strategy}, n_paths, seed, options, t, 0.0,
                       [alpha](double x) { return std::exp(-alpha * x); })
      .utilities.front();
}

}  // namespace catre
