#include "catre/market.hpp"

#include <cmath>
#include <sstream>

#include "catre/error.hpp"

namespace catre {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument("model parameters: " + msg);
}

}  // namespace

void validate(const ModelParams& p) {
  require(std::isfinite(p.r) && std::isfinite(p.mu), "r and mu must be finite");
  require(p.sigma > 0.0 && std::isfinite(p.sigma), "sigma must be positive");
  require(p.lambda >= 0.0 && std::isfinite(p.lambda), "lambda must be nonnegative");
  require(p.alpha > 0.0 && std::isfinite(p.alpha), "alpha must be positive");
  require(p.horizon > 0.0 && std::isfinite(p.horizon), "horizon T must be positive");
  require(p.kappa > 0.0 && std::isfinite(p.kappa), "kappa must be positive");
  require(p.eta > 0.0, "eta must be positive");
  require(p.theta > p.eta, "theta must exceed eta (reinsurance is more expensive than the insurer's own loading)");
  require(p.dependence_threshold > 0.0, "dependence threshold L must be positive");
  require(std::isfinite(p.x0), "x0 must be finite");
  require(p.investment_cap >= 0.0, "investment cap K must be positive (0 selects the default)");
}

void validate(const ModelParams& p, const ClaimMixture& mixture) {
  validate(p);
  const double tilt = max_tilt_rate(p);
  for (std::size_t j = 0; j < mixture.size(); ++j) {
    if (!(tilt < mixture[j].tilt_limit())) {
      std::ostringstream os;
      os << "model parameters: alpha*e^{|r|T} = " << tilt << " must stay below the tilt limit "
         << mixture[j].tilt_limit() << " of claim family " << j + 1 << " (" << mixture[j].describe()
         << "), otherwise the exponential-utility integrals diverge";
      throw InvalidArgument(os.str());
    }
  }
}

double default_investment_cap(const ModelParams& p) {
  const double indep = std::abs(p.mu - p.r) / (p.alpha * p.sigma * p.sigma) * std::exp(std::abs(p.r) * p.horizon);
  return 10.0 * std::max(indep, 1.0);
}

ModelParams with_default_cap(ModelParams params) {
  if (params.investment_cap <= 0.0) params.investment_cap = default_investment_cap(params);
  return params;
}

double net_income_rate(const ModelParams& p, double b) {
  if (!(b >= 0.0 && b <= 1.0)) throw InvalidArgument("retention level must lie in [0, 1]");
  return (p.eta - p.theta) * p.kappa + (1.0 + p.theta) * p.kappa * b;
}

double discount_factor(const ModelParams& p, double t) {
  if (!(t >= 0.0 && t <= p.horizon + 1e-12)) throw InvalidArgument("time must lie in [0, T]");
  if (p.r == 0.0) return 1.0;
  return std::exp(p.r * (p.horizon - t));
}

double max_tilt_rate(const ModelParams& p) { return p.alpha * std::exp(std::abs(p.r) * p.horizon); }

void validate(const StrategyPoint& z, const ModelParams& params) {
  if (!(z.b >= 0.0 && z.b <= 1.0)) throw InvalidArgument("retention level must lie in [0, 1]");
  const double cap = params.investment_cap > 0.0 ? params.investment_cap : default_investment_cap(params);
  if (!(std::abs(z.xi) <= cap)) throw InvalidArgument("investment exceeds the cap K");
}

}  // namespace catre
