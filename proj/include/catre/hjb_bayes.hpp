#pragma once

// Partial-information solver: backward value iteration for g(t, p) on a
// time x simplex grid and the Bayesian strategy built from it.
//
// The value function separates as V(t, x, p) = -exp(-alpha x e^{r(T-t)}) g(t, p)
// with g(T, .) = 1. Each explicit backward step
//
//   g(t_i, p) = g(t_{i+1}, p) + dt * inf_{xi, b} Lg(t_{i+1}, p; xi, b)
//
// delegates the infimum to the first-order conditions, with the posterior
// after a claim, J(p, y), looked up on the lattice by barycentric
// interpolation.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "catre/filter.hpp"
#include "catre/foc.hpp"
#include "catre/foc_full.hpp"
#include "catre/simplex.hpp"

namespace catre {

struct GridSpec {
  int time_steps = 200;
  int lattice_divisions = 32;
  int quadrature_nodes = 64;  // per region, (0, L) and (L, inf)
  int threads = 1;
};

/// Fixed quadrature rule in the claim size, split at the dependence threshold.
///
/// With c = min_k rho_k - alpha e^{|r|T}, the region (0, L) uses the map
/// y = -log(1 - u (1 - e^{-c L})) / c followed by Gauss-Legendre in u, and
/// (L, inf) uses Gauss-Laguerre in c (y - L). Families with bounded support
/// and no exponential member fall back to Gauss-Legendre on both pieces.
class ClaimQuadrature {
 public:
  ClaimQuadrature(const ModelParams& params, const ClaimMixture& mixture, int nodes_per_region);

  struct Node {
    double y;
    double weight;
    bool above;  // y > L
  };
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  double decay_rate() const noexcept { return decay_; }

 private:
  std::vector<Node> nodes_;
  double decay_;
};

/// g on a time x simplex grid together with the minimizing controls found at each node.
class ValueGrid {
 public:
  ValueGrid(std::vector<double> times, SimplexLattice lattice);

  const std::vector<double>& times() const noexcept { return times_; }
  const SimplexLattice& lattice() const noexcept { return lattice_; }
  std::size_t time_count() const noexcept { return times_.size(); }

  std::vector<double>& slice(std::size_t i) { return values_.at(i); }
  const std::vector<double>& slice(std::size_t i) const { return values_.at(i); }

  /// Linear in time between slices, barycentric in p.
  double value(double t, std::span<const double> p) const;
  /// Slice of g interpolated to time t.
  std::vector<double> slice_at(double t) const;

  struct Control {
    StrategyPoint z;
    Regime regime = Regime::Interior;
  };
  std::vector<Control>& controls(std::size_t i) { return controls_.at(i); }
  const std::vector<Control>& controls(std::size_t i) const { return controls_.at(i); }

  /// Columns: t, p_1..p_m, g.
  void write_csv(const std::string& path) const;

 private:
  std::vector<double> times_;
  SimplexLattice lattice_;
  std::vector<std::vector<double>> values_;
  std::vector<std::vector<Control>> controls_;
};

struct ValueIterationDiagnostics {
  double log_k1_bound = 0.0;           // log of the a-priori bound on g
  double min_g = 0.0;
  double max_g = 0.0;
  double time_lipschitz = 0.0;         // max |g(t_i) - g(t_{i+1})| / dt
  double max_edge_second_difference = 0.0;  // max over edge lines; <= 0 for concave slices
  int bisection_fallbacks = 0;
  double max_residual = 0.0;           // largest active FOC residual over all nodes
};

struct ValueIterationResult {
  std::shared_ptr<const ValueGrid> grid;
  ValueIterationDiagnostics diagnostics;
};

/// log K1, the a-priori bound on g from the worst case of the generator.
double log_value_bound(const ModelParams& params, const ClaimMixture& mixture);

ValueIterationResult value_iteration(const ModelParams& params, const ClaimMixture& mixture,
                                     const GridSpec& spec = {});

/// Tilted moments of sum_k p_k g(t, J(p, y)) / g(t, p) f_k(y) at one (t, p).
class RatioMoments final : public MomentSource {
 public:
  /// `slice` holds g(t, .) on the lattice.
  RatioMoments(const ClaimQuadrature& quadrature, const ClaimMixture& mixture, const SimplexLattice& lattice,
               std::span<const double> slice, std::span<const double> p, double tilt_limit);

  TiltedMoments moments(double s) const override;
  double tilt_limit() const override { return tilt_limit_; }

 private:
  std::vector<double> y_;
  std::vector<double> mass_;  // quadrature weight x ratio-weighted predictive density
  std::vector<char> above_;
  double tilt_limit_;
};

struct GRatioIntegrals {
  double tail = 0.0;  // sum_k p_k ∫_L^inf R e^{s y} f_k dy
  double mean = 0.0;  // sum_k p_k ∫_0^inf y R e^{s y} (1{y<=L} + 1{y>L} M_Z(alpha e xi)) f_k dy
  TiltedMoments moments;
};

/// The integrals entering v1 and v2 at (t, p, xi, b).
GRatioIntegrals g_ratio_integrals(const ValueGrid& grid, const ModelParams& params, const ClaimMixture& mixture,
                                  double t, const FilterState& p, double xi, double b, int quadrature_nodes = 64);

struct BayesSolution {
  FocSolution foc;
  StrategyPoint strategy() const { return foc.z; }
};

/// Solves the Bayesian first-order conditions at (t, p) against g(t, .) from the grid.
BayesSolution solve_foc_bayes(const ValueGrid& grid, const ModelParams& params, const ClaimMixture& mixture,
                              double t, const FilterState& p, int quadrature_nodes = 64);

/// Feedback strategy (t, p_{t-}) -> (xi*, b*).
class BayesStrategy {
 public:
  BayesStrategy(std::shared_ptr<const ValueGrid> grid, ModelParams params, ClaimMixture mixture,
                int quadrature_nodes = 64);

  /// Solves the first-order conditions at (t, p).
  BayesSolution solve(double t, const FilterState& p) const;
  /// Interpolates the controls stored on the grid (fast path for simulation).
  StrategyPoint tabulated(double t, std::span<const double> p) const;

  const ValueGrid& grid() const noexcept { return *grid_; }

 private:
  std::shared_ptr<const ValueGrid> grid_;
  ModelParams params_;
  ClaimMixture mixture_;
  int quadrature_nodes_;
};

/// Investment bounds available before any filtering: the roots in xi of
/// v1^max(t, xi, b) = mu - r (family m) and v1^min(t, xi, b) = mu - r (family 1).
struct AprioriBounds {
  double r1_max = 0.0;  // lower bound on xi*
  double r1_min = 0.0;  // upper bound on xi*
};

/// Requires the mixture to be stochastically ordered.
AprioriBounds apriori_bounds(const ModelParams& params, const ClaimMixture& mixture, double t, double b);

struct MeanModelBound {
  FullInfoSolution mean_model;        // full-information solve under sum_k p_k F_k
  double xi_bound_at_bayes_b = 0.0;   // root of v1 under the mean model at the Bayesian retention
  BayesSolution bayes;
  bool positive_investment = false;   // xi* > 0
  bool retention_matches = false;     // b* equals the mean-model retention
};

MeanModelBound mean_model_upper_bound(const ValueGrid& grid, const ModelParams& params, const ClaimMixture& mixture,
                                      double t, const FilterState& p, int quadrature_nodes = 64);

/// Full-information g for family j: exp(int_t^T psi_j(s) ds) with psi_j the
/// minimized generator, integrated on the grid's own time nodes by the same
/// explicit rule when `explicit_rule` is set, exactly otherwise.
double full_information_g(const ModelParams& params, const ClaimFamily& family, double t, int time_steps,
                          bool explicit_rule);

/// Refinement study: g(0, .) at grid levels (dt, h), (dt/2, h/2), (dt/4, h/4).
struct ConvergenceReport {
  std::vector<double> differences;  // max-norm change between successive levels
  double empirical_order = 0.0;
};

ConvergenceReport scheme_self_consistency(const ModelParams& params, const ClaimMixture& mixture,
                                          const GridSpec& coarse);

}  // namespace catre
