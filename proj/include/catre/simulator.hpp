#pragma once

// Monte Carlo engine for the surplus process under a feedback strategy.
//
// Claim times are exact (exponential inter-arrivals). The diffusion is
// integrated exactly per interval of a uniform grid with the claim times
// inserted, holding the control fixed at the left endpoint. With r = 0 this
// coincides with Euler-Maruyama on the refined grid.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "catre/distributions.hpp"
#include "catre/filter.hpp"
#include "catre/market.hpp"

namespace catre {

/// (t, p_{t-}) -> (xi, b). Must return b in [0, 1].
using FeedbackStrategy = std::function<StrategyPoint(double t, const FilterState& p_minus)>;

FeedbackStrategy constant_strategy(StrategyPoint z);

struct SimulationOptions {
  int steps_per_year = 500;
  bool antithetic = false;  // pairs paths with negated Brownian increments
  int threads = 1;
  std::size_t batch_size = 1024;
};

struct PathRecord {
  std::size_t family = 0;  // the drawn parameter theta

  std::vector<double> jump_times;
  std::vector<double> claims;
  std::vector<double> drops;
  std::vector<double> wealth_before_jump;
  std::vector<double> wealth_after_jump;
  std::vector<StrategyPoint> jump_controls;  // z(T_n, p_{T_n-})

  // One entry per grid node, the first at the start time. Entry k > 0 refers
  // to the interval (times[k-1], times[k]] and, at claim times, to the state
  // after the claim.
  std::vector<double> times;
  std::vector<double> brownian_increments;  // Gaussian part of the interval, sigma excluded
  std::vector<double> wealth;
  std::vector<FilterState> filter;
  std::vector<StrategyPoint> controls;  // control on the interval ending at times[k]

  double terminal_wealth() const { return wealth.back(); }
};

/// Seed of path `index` inside an estimate run with `seed`; simulate_path with it replays that path.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

/// One path from (t0, x0) with theta drawn from `prior` and the filter started at `prior`.
PathRecord simulate_path(const ModelParams& params, const ClaimMixture& mixture, const FilterState& prior,
                         const FeedbackStrategy& strategy, std::uint64_t seed, const SimulationOptions& options = {},
                         double t0 = 0.0, double x0 = -1.0);

/// Columns: t, X, p_1..p_m, xi, b.
void write_path_csv(const PathRecord& path, const std::string& filename);

struct UtilityEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Sample mean of U(X_T) = -exp(-alpha X_T) from (0, x0).
UtilityEstimate estimate_utility(const ModelParams& params, const ClaimMixture& mixture, const FilterState& prior,
                                 const FeedbackStrategy& strategy, std::size_t n_paths, std::uint64_t seed,
                                 const SimulationOptions& options = {});

/// g^{xi,b}(t, p) = E[exp(-alpha (X_T - x e^{r(T-t)}))] with theta ~ p and the filter started at p.
UtilityEstimate estimate_g(const ModelParams& params, const ClaimMixture& mixture, const FeedbackStrategy& strategy,
                           double t, const FilterState& p, std::size_t n_paths, std::uint64_t seed,
                           const SimulationOptions& options = {});

/// Utilities of several strategies on common random numbers.
struct PairedEstimate {
  std::vector<UtilityEstimate> utilities;
  std::vector<UtilityEstimate> differences;  // strategy i minus strategy 0, path by path
};

PairedEstimate estimate_utility_paired(const ModelParams& params, const ClaimMixture& mixture,
                                       const FilterState& prior, const std::vector<FeedbackStrategy>& strategies,
                                       std::size_t n_paths, std::uint64_t seed, const SimulationOptions& options = {});

/// Streaming mean and variance with pairwise merging.
struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x);
  void merge(const RunningStats& other);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

}  // namespace catre
