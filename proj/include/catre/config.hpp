#pragma once

// Run configuration: a YAML tree parsed into validated model objects.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catre/distributions.hpp"
#include "catre/filter.hpp"
#include "catre/hjb_bayes.hpp"
#include "catre/market.hpp"

namespace catre {

struct GoldenPoint {
  double L = 0.0;
  std::optional<double> xi;
  double xi_tolerance = 0.0;
  std::optional<double> b;
  double b_tolerance = 0.0;
};

struct SweepConfig {
  double log10_min = -3.0;
  double log10_max = 6.0;
  int points = 200;
  std::vector<double> extra;  // explicit L values merged into the grid
  std::vector<GoldenPoint> golden;
  std::optional<double> golden_crossing;
  double crossing_tolerance = 0.0;
  std::optional<double> golden_independent;  // closed-form xi without stock drops
  double residual_tolerance = 1e-9;

  std::vector<double> grid() const;  // sorted, unique
};

struct SolverConfig {
  GridSpec grid;
  double grid_tolerance = 1e-3;   // relative, corner consistency
  double bound_tolerance = 1e-6;  // absolute slack on bound inequalities
  int report_times = 9;
  int report_probabilities = 9;
  bool self_consistency = true;
};

/// Model used for the Monte Carlo checks. Defaults to a light-tailed world in
/// which the utility estimator has finite fourth moment.
struct ValidationWorld {
  ModelParams params = [] {
    ModelParams p;
    p.kappa = 13.0;
    p.lambda = 20.0;
    p.dependence_threshold = 11.0;
    return p;
  }();
  ClaimMixture claims{{ClaimFamily::exponential(0.5)}};
  ClaimMixture mixture{{ClaimFamily::exponential(0.5), ClaimFamily::exponential(0.25)}};
  StrategyPoint mixture_strategy{20.0, 0.5};
  double xi_perturbation = 0.2;  // relative
  double b_perturbation = 0.1;   // absolute, clamped to [0, 1]
  bool value_iteration_check = true;
};

struct SimulationConfig {
  std::size_t n_paths = 100000;
  std::uint64_t seed = 20240917;
  int steps_per_year = 500;
  int threads = 1;
  bool antithetic = false;
  std::size_t dump_paths = 0;  // sample paths of the solved strategy written by `validate`
  ValidationWorld world;
};

struct RunConfig {
  std::string origin;  // file name or "<string>"
  ModelParams params;
  ClaimMixture mixture{{ClaimFamily::exponential(0.1)}};
  FilterState prior = FilterState::uniform(1);
  SweepConfig sweep;
  SolverConfig solver;
  SimulationConfig simulation;
  std::string output_directory = "out";
};

/// Throws ConfigError carrying the 1-based line of the offending node.
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::string& path);

}  // namespace catre
