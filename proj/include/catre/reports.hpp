#pragma once

// Orchestration behind the CLI subcommands: the threshold sweep, the
// Bayesian bound report and the Monte Carlo validation report.

#include <optional>
#include <string>
#include <vector>

#include "catre/config.hpp"
#include "catre/foc_full.hpp"
#include "catre/hjb_bayes.hpp"
#include "catre/simulator.hpp"

namespace catre {

// ---------------------------------------------------------------- sweep

struct SweepRow {
  double L = 0.0;
  FullInfoSolution solution;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> zero_crossing;  // L at which xi*(L) changes sign
  double independent_xi = 0.0;          // (mu - r) / (alpha sigma^2) at t = 0
  double max_residual_v1 = 0.0;         // over interior rows
  double max_residual_v2 = 0.0;
  bool nondecreasing = true;
  bool below_independent = true;
  double seconds = 0.0;
};

/// Full-information solve at t = 0 for every L of the sweep grid (family 1 of the config).
SweepResult run_threshold_sweep(const RunConfig& config);

/// Columns: L, xi_star, b_star, regime, A_F, B_F, residual_v1, residual_v2.
void write_sweep_csv(const SweepResult& result, const std::string& path);

struct AssertionResult {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Golden points, the zero crossing and the structural sweep properties.
std::vector<AssertionResult> check_sweep(const RunConfig& config, const SweepResult& result);

/// Two-panel plot of xi*(L) and b*(L) on a log-scaled L axis. False when PNG support is not built in.
bool render_sweep_png(const SweepResult& result, const std::string& path);

// ---------------------------------------------------------------- Bayesian report

struct BayesRow {
  double t = 0.0;
  std::vector<double> p;
  StrategyPoint z;
  Regime regime = Regime::Interior;
  double residual = 0.0;

  // Bounds from the extreme families at the solved retention (no premise).
  double r1_max = 0.0;
  double r1_min = 0.0;
  bool apriori_ok = true;

  // Full-information solutions of the extreme families, compared when the
  // retentions of all three solves coincide.
  double xi_family_first = 0.0;
  double xi_family_last = 0.0;
  bool apriori_premise = false;
  bool apriori_gated_ok = true;

  // Mean-model comparison, premise xi* > 0 and matching retention.
  double xi_mean_model = 0.0;
  double b_mean_model = 0.0;
  double xi_mean_model_at_b = 0.0;
  bool mean_premise = false;
  bool mean_ok = true;

  // Independent-case ceiling (no premise).
  double xi_independent = 0.0;
  bool independent_ok = true;

  // Corner rows only.
  bool corner = false;
  double corner_deviation = 0.0;  // relative, against the full-information solve
  bool corner_ok = true;
};

struct BayesReport {
  std::vector<BayesRow> rows;
  ValueIterationDiagnostics diagnostics;
  double corner_max_deviation = 0.0;  // over all time nodes and corners
  bool terminal_slice_exact = true;
  int ungated_violations = 0;
  int gated_violations = 0;
  int gated_rows = 0;
  std::optional<ConvergenceReport> convergence;
  double seconds = 0.0;
};

BayesReport run_bayes_report(const RunConfig& config);

/// Columns documented in the README.
void write_bayes_csv(const BayesReport& report, const std::string& path);

// ---------------------------------------------------------------- Monte Carlo validation

struct McCheck {
  std::string name;
  std::string description;
  double statistic = 0.0;  // z-score or absolute error, see `kind`
  double threshold = 0.0;
  std::string kind;        // "rel_error", "z_score", "lower_z"
  bool pass = false;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, UtilityEstimate>> estimates;  // raw Monte Carlo records behind the check
};

struct McReport {
  std::vector<McCheck> checks;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  double seconds = 0.0;
  std::vector<PathRecord> sample_paths;  // simulation.dump_paths paths of the solved strategy
  bool all_pass() const;
};

McReport run_mc_validation(const RunConfig& config);

void write_mc_json(const McReport& report, const std::string& path);

// ---------------------------------------------------------------- shared helpers

/// Closed-form g for a constant strategy with one claim family and r = 0:
/// exp(T (-alpha((mu - r) xi + c(b)) + alpha^2 sigma^2 xi^2 / 2 + lambda (E[e^{alpha b Y}(1{Y<=L} + 1{Y>L} M_Z(alpha xi))] - 1))).
double constant_strategy_g(const ModelParams& params, const ClaimFamily& family, StrategyPoint z);

}  // namespace catre
