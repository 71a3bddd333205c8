#pragma once

// Complete-information strategy: the claim-size law is known.

#include <array>
#include <optional>
#include <span>

#include "catre/filter.hpp"
#include "catre/foc.hpp"

namespace catre {

struct FullInfoSolution {
  double xi_star = 0.0;
  double b_star = 1.0;
  Regime regime = Regime::Interior;
  double A_F = 0.0;
  double B_F = 0.0;
  std::array<double, 2> residuals{};  // (v1 - (mu - r), v2 - (1 + theta) kappa)
  std::optional<StrategyPoint> unconstrained_root;

  StrategyPoint strategy() const { return {xi_star, b_star}; }
};

/// Optimal (xi, b) at time t when claims follow `family`.
FullInfoSolution solve_foc_full(const ModelParams& params, const ClaimFamily& family, double t,
                                const FocOptions& options = {});

/// Same, for the claim law sum_k w_k F_k (the mean model when w = p).
FullInfoSolution solve_foc_full(const ModelParams& params, const ClaimMixture& mixture,
                                std::span<const double> weights, double t, const FocOptions& options = {});

/// (mu - r) / (alpha sigma^2) e^{-r (T - t)}: the optimal investment without stock drops.
double independent_case_investment(const ModelParams& params, double t);

/// Strategy of the model without claim-triggered stock drops. The retention
/// solves lambda sum_k p_k ∫ y e^{alpha b y e^{r(T-t)}} f_k(y) dy = (1 + theta) kappa
/// with clamping to [0, 1]; the g-ratio is taken as 1 (exact at corners and for m = 1).
StrategyPoint independent_case_strategy(const ModelParams& params, const ClaimMixture& mixture, double t,
                                        const FilterState& p);

}  // namespace catre
