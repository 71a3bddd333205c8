#pragma once

// Independent reference computations for the tests. Everything here works
// from the claim density and the model formulas directly, through Boost
// quadrature and root finding, without touching the solver's moment code.

#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "catre/market.hpp"

namespace oracle {

using Density = std::function<double(double)>;

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  if (std::isinf(b)) {
    boost::math::quadrature::exp_sinh<double> es;
    // Products like y^n e^{sy} f(y) overflow to inf * 0 far out in the tail, where the true value is 0.
    return es.integrate([&](double y) {
      const double v = f(y);
      return std::isfinite(v) ? v : 0.0;
    }, a, b);
  }
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

// Integrates over (0, L) in panels of one decay length.
inline double integrate_below(const std::function<double(double)>& f, double L, double scale) {
  double acc = 0.0, lo = 0.0;
  while (lo < L) {
    const double hi = std::min(L, lo + scale);
    acc += integrate(f, lo, hi);
    if (hi >= 200.0 * scale) break;  // beyond this the integrand has decayed past double precision
    lo = hi;
  }
  return acc;
}

// Uniform drop on (0, 1): M(u) and M'(u) written out from the integral.
inline double uniform_mgf(double u) { return u == 0.0 ? 1.0 : std::expm1(u) / u; }
inline double uniform_mgf_d1(double u) {
  if (std::abs(u) < 1e-4) return 0.5 + u / 3.0 + u * u / 8.0;
  return ((u - 1.0) * std::exp(u) + 1.0) / (u * u);
}

struct World {
  catre::ModelParams params;
  Density f;
  double scale = 10.0;  // a length over which f decays noticeably
};

// Partial derivatives of gamma / g divided by alpha e, i.e. v1 - (mu - r) and v2 - (1 + theta) kappa,
// for a uniform drop law.
struct Gradient {
  double dxi;
  double db;
};

inline Gradient gradient(const World& w, double t, double xi, double b) {
  const auto& p = w.params;
  const double e = std::exp(p.r * (p.horizon - t));
  const double s = p.alpha * e * b;
  const double u = p.alpha * e * xi;
  const double L = p.dependence_threshold;
  auto tilt = [&](double y) { return std::exp(s * y) * w.f(y); };
  const double tail0 = integrate(tilt, L, std::numeric_limits<double>::infinity());
  const double below1 = integrate_below([&](double y) { return y * tilt(y); }, L, w.scale);
  const double above1 = integrate([&](double y) { return y * tilt(y); }, L, std::numeric_limits<double>::infinity());
  const double v1 = p.alpha * p.sigma * p.sigma * e * xi + p.lambda * tail0 * uniform_mgf_d1(u);
  const double v2 = p.lambda * (below1 + above1 * uniform_mgf(u));
  return {v1 - (p.mu - p.r), v2 - (1.0 + p.theta) * p.kappa};
}

// gamma / g itself, for the convexity check.
inline double gamma_over_g(const World& w, double t, double xi, double b) {
  const auto& p = w.params;
  const double e = std::exp(p.r * (p.horizon - t));
  const double s = p.alpha * e * b;
  const double u = p.alpha * e * xi;
  const double L = p.dependence_threshold;
  auto tilt = [&](double y) { return std::exp(s * y) * w.f(y); };
  const double below0 = integrate_below(tilt, L, w.scale);
  const double above0 = integrate(tilt, L, std::numeric_limits<double>::infinity());
  return -p.alpha * e * ((p.mu - p.r) * xi + (1.0 + p.theta) * p.kappa * b) +
         0.5 * p.alpha * p.alpha * p.sigma * p.sigma * e * e * xi * xi +
         p.lambda * (below0 + above0 * uniform_mgf(u));
}

// Root in xi of the first condition at fixed b (v1 is increasing in xi).
inline double xi_given_b(const World& w, double t, double b) {
  auto g = [&](double xi) { return gradient(w, t, xi, b).dxi; };
  double lo = -50.0, hi = 50.0;
  while (g(lo) > 0.0) lo *= 2.0;
  while (g(hi) < 0.0) hi *= 2.0;
  std::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), it);
  return 0.5 * (r.first + r.second);
}

struct Optimum {
  double xi;
  double b;
};

// Minimizer of gamma over R x [0, 1]: profile in b, clamped when the profile
// derivative does not change sign on [0, 1].
inline Optimum solve(const World& w, double t) {
  auto profile = [&](double b) { return gradient(w, t, xi_given_b(w, t, b), b).db; };
  const double d0 = profile(0.0), d1 = profile(1.0);
  if (d0 >= 0.0) return {xi_given_b(w, t, 0.0), 0.0};
  if (d1 <= 0.0) return {xi_given_b(w, t, 1.0), 1.0};
  std::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(profile, 0.0, 1.0, d0, d1, boost::math::tools::eps_tolerance<double>(50),
                                             it);
  const double b = 0.5 * (r.first + r.second);
  return {xi_given_b(w, t, b), b};
}

inline Density exponential(double rate) {
  return [rate](double y) { return y < 0.0 ? 0.0 : rate * std::exp(-rate * y); };
}

// Reference market used across the tests.
inline catre::ModelParams reference_params(double L = 100.0) {
  catre::ModelParams p;
  p.r = 0.0;
  p.mu = 0.3;
  p.sigma = 0.4;
  p.lambda = 10.0;
  p.dependence_threshold = L;
  p.alpha = 0.05;
  p.horizon = 1.0;
  p.kappa = 100.0;
  p.eta = 1.25;
  p.theta = 2.5;
  p.x0 = 10.0;
  return p;
}

}  // namespace oracle

namespace oracle {

// g for a constant strategy with Exp(rate) claims, a uniform drop and r = 0,
// started at time t: exp((T - t) psi) with psi the generator over g.
inline double constant_g_exponential(const catre::ModelParams& p, double rate, double xi, double b, double t = 0.0) {
  const double s = p.alpha * b;
  const double L = p.dependence_threshold;
  const double below = rate / (rate - s) * -std::expm1(-(rate - s) * L);
  const double above = rate / (rate - s) * std::exp(-(rate - s) * L);
  const double income = (p.eta - p.theta) * p.kappa + (1.0 + p.theta) * p.kappa * b;
  const double psi = -p.alpha * ((p.mu - p.r) * xi + income) + 0.5 * p.alpha * p.alpha * p.sigma * p.sigma * xi * xi +
                     p.lambda * (below + above * uniform_mgf(p.alpha * xi) - 1.0);
  return std::exp(psi * (p.horizon - t));
}

}  // namespace oracle
