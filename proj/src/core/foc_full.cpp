#include "catre/foc_full.hpp"

#include <cmath>
#include <vector>

namespace catre {

namespace {

FullInfoSolution to_full(const FocSolution& s) {
  FullInfoSolution out;
  out.xi_star = s.z.xi;
  out.b_star = s.z.b;
  out.regime = s.regime;
  out.A_F = s.A;
  out.B_F = s.B;
  out.residuals = {s.residual_v1, s.residual_v2};
  out.unconstrained_root = s.unconstrained_root;
  return out;
}

}  // namespace

FullInfoSolution solve_foc_full(const ModelParams& params, const ClaimFamily& family, double t,
                                const FocOptions& options) {
  const ModelParams p = with_default_cap(params);
  validate(p, ClaimMixture({family}));
  const FamilyMoments source(family, p.dependence_threshold);
  const FocSystem system(p, t, source);
  auto out = to_full(solve_foc(system, options));
  require_interior_investment(out.strategy(), p);
  return out;
}

FullInfoSolution solve_foc_full(const ModelParams& params, const ClaimMixture& mixture,
                                std::span<const double> weights, double t, const FocOptions& options) {
  const ModelParams p = with_default_cap(params);
  validate(p, mixture);
  const FamilyMoments source(mixture, std::vector<double>(weights.begin(), weights.end()), p.dependence_threshold);
  const FocSystem system(p, t, source);
  auto out = to_full(solve_foc(system, options));
  require_interior_investment(out.strategy(), p);
  return out;
}

double independent_case_investment(const ModelParams& params, double t) {
  const double e = discount_factor(params, t);
  return params.excess_return() / (params.sigma * params.sigma * params.alpha) / e;
}

StrategyPoint independent_case_strategy(const ModelParams& params, const ClaimMixture& mixture, double t,
                                        const FilterState& p) {
  ModelParams no_drops = with_default_cap(params);
  no_drops.dependence_threshold = kInf;
  validate(no_drops, mixture);
  const FamilyMoments source(mixture, std::vector<double>(p.probs().begin(), p.probs().end()), kInf);
  const FocSystem system(no_drops, t, source);
  FocOptions opt;
  opt.search_unconstrained = false;
  const auto s = solve_foc(system, opt);
  return {independent_case_investment(params, t), s.z.b};
}

}  // namespace catre
