#pragma once

#include <string>

#include "catre/distributions.hpp"

namespace catre {

/// Market, insurance, and preference constants.
///
/// Units: rates per year, amounts in claim currency. `dependence_threshold`
/// (L) may be +inf, which switches the claim-triggered stock drops off.
struct ModelParams {
  double r = 0.0;                       // risk-free rate
  double mu = 0.3;                      // risky drift
  double sigma = 0.4;                   // risky volatility
  double lambda = 10.0;                 // claim intensity
  double dependence_threshold = 100.0;  // L
  double alpha = 0.05;                  // absolute risk aversion
  double horizon = 1.0;                 // T
  double kappa = 100.0;                 // premium scale
  double eta = 1.25;                    // insurer safety loading
  double theta = 2.5;                   // reinsurer safety loading
  double x0 = 10.0;                     // initial capital
  double investment_cap = 0.0;          // K; 0 selects the default cap
  JumpLaw jump = JumpLaw::uniform();

  /// (1 + theta) * kappa, the reinsurance price of ceding everything.
  double full_reinsurance_price() const noexcept { return (1.0 + theta) * kappa; }
  double excess_return() const noexcept { return mu - r; }
};

/// Amount invested and retained fraction of each claim.
struct StrategyPoint {
  double xi = 0.0;
  double b = 1.0;
};

/// Throws InvalidArgument with a descriptive message when an invariant fails.
void validate(const ModelParams& params);
/// Also checks that every tilt alpha*b*e^{|r|T}, b in [0,1], stays below each family's tilt limit.
void validate(const ModelParams& params, const ClaimMixture& mixture);

/// Fills investment_cap with 10 x the independent-case investment when it is unset.
ModelParams with_default_cap(ModelParams params);
double default_investment_cap(const ModelParams& params);

/// c(b) = (eta - theta) kappa + (1 + theta) kappa b.
double net_income_rate(const ModelParams& params, double b);

/// e^{r (T - t)}.
double discount_factor(const ModelParams& params, double t);

/// Largest tilt rate alpha*e^{|r|T} met anywhere on [0, T] x [0, 1].
double max_tilt_rate(const ModelParams& params);

void validate(const StrategyPoint& z, const ModelParams& params);

}  // namespace catre
