#include "catre/foc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "catre/error.hpp"

namespace catre {

// ---------------------------------------------------------------- FamilyMoments

FamilyMoments::FamilyMoments(const ClaimMixture& mixture, std::vector<double> weights, double threshold)
    : weights_(std::move(weights)), threshold_(threshold), tilt_limit_(kInf) {
  if (weights_.size() != mixture.size()) throw InvalidArgument("family weights do not match the mixture size");
  for (std::size_t k = 0; k < mixture.size(); ++k) {
    families_.push_back(mixture[k]);
    if (weights_[k] > 0.0) tilt_limit_ = std::min(tilt_limit_, mixture[k].tilt_limit());
  }
}

FamilyMoments::FamilyMoments(const ClaimFamily& family, double threshold)
    : families_{family}, weights_{1.0}, threshold_(threshold), tilt_limit_(family.tilt_limit()) {}

TiltedMoments FamilyMoments::moments(double s) const {
  TiltedMoments m;
  for (std::size_t k = 0; k < families_.size(); ++k) {
    const double w = weights_[k];
    if (w == 0.0) continue;
    for (int n = 0; n < 3; ++n) {
      m.below[n] += w * tilted_moment(families_[k], n, s, 0.0, threshold_);
      if (std::isfinite(threshold_)) m.above[n] += w * tilted_moment(families_[k], n, s, threshold_, kInf);
    }
  }
  return m;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Interior:
      return "interior";
    case Regime::ClampedAtZero:
      return "clamped_at_zero";
    case Regime::ClampedAtOne:
    default:
      return "clamped_at_one";
  }
}

// ---------------------------------------------------------------- FocSystem

FocSystem::FocSystem(const ModelParams& params, double t, const MomentSource& source)
    : params_(params), source_(source), discount_(discount_factor(params, t)) {}

double FocSystem::b_limit() const noexcept {
  const double lim = source_.tilt_limit();
  if (!std::isfinite(lim)) return kInf;
  return lim / (params_.alpha * discount_);
}

FocSystem::Eval FocSystem::evaluate(double xi, double b) const {
  const double ae = params_.alpha * discount_;
  const auto m = source_.moments(ae * b);
  const double u = ae * xi;
  const double mz0 = params_.jump.mgf(u, 0);
  const double mz1 = params_.jump.mgf(u, 1);
  const double mz2 = params_.jump.mgf(u, 2);
  const double lam = params_.lambda;
  const double s2e = params_.sigma * params_.sigma * discount_;
  Eval e{};
  e.v1 = params_.alpha * s2e * xi + lam * m.above[0] * mz1;
  e.v2 = lam * (m.below[1] + m.above[1] * mz0);
  e.j11 = params_.alpha * s2e + lam * m.above[0] * mz2 * ae;
  e.j12 = lam * ae * m.above[1] * mz1;
  e.j22 = lam * ae * (m.below[2] + m.above[2] * mz0);
  return e;
}

double FocSystem::v1(double xi, double b) const { return evaluate(xi, b).v1; }
double FocSystem::v2(double xi, double b) const { return evaluate(xi, b).v2; }

double FocSystem::gamma_over_g(double xi, double b) const {
  const double ae = params_.alpha * discount_;
  const auto m = source_.moments(ae * b);
  const double mz0 = params_.jump.mgf(ae * xi, 0);
  const double quad = params_.excess_return() * xi -
                      0.5 * params_.alpha * params_.sigma * params_.sigma * discount_ * xi * xi +
                      params_.full_reinsurance_price() * b;
  return -ae * quad + params_.lambda * (m.below[0] + m.above[0] * mz0);
}

double FocSystem::generator_over_g(double xi, double b) const {
  const double ae = params_.alpha * discount_;
  return -params_.lambda + ae * (params_.theta - params_.eta) * params_.kappa + gamma_over_g(xi, b);
}

double FocSystem::solve_xi(double b) const {
  const double ae = params_.alpha * discount_;
  const double a0 = source_.moments(ae * b).above[0];
  const double slope = params_.alpha * params_.sigma * params_.sigma * discount_;
  const double target = params_.excess_return();
  const double lam = params_.lambda;
  auto f = [&](double xi) { return slope * xi + lam * a0 * params_.jump.mgf(ae * xi, 1) - target; };
  auto df = [&](double xi) { return slope + lam * a0 * ae * params_.jump.mgf(ae * xi, 2); };

  // The jump term is positive, so the independent-case root bounds from above;
  // M_Z' <= E[Z] for nonpositive arguments bounds from below.
  double hi = target / slope;
  double lo = std::min(0.0, (target - lam * a0 * params_.jump.mean()) / slope) - 1.0;
  if (lam * a0 == 0.0) return hi;
  double x = hi;
  for (int it = 0; it < 300; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    double next = x - fx / df(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(x)))
      return next;
    x = next;
  }
  throw NoConvergence("scalar investment equation v1(xi, b) = mu - r did not converge");
}

// ---------------------------------------------------------------- solver

namespace {

struct Scales {
  double s1, s2;
};

double merit(double f1, double f2, const Scales& sc) {
  const double a = f1 / sc.s1, b = f2 / sc.s2;
  return a * a + b * b;
}

bool converged(double f1, double f2, const Scales& sc) {
  return std::abs(f1) <= 1e-12 * sc.s1 && std::abs(f2) <= 1e-12 * sc.s2;
}

// Damped Newton on (F1, F2) = (v1 - (mu - r), v2 - P) with b kept in (b_lo, b_hi).
std::optional<StrategyPoint> damped_newton(const FocSystem& sys, StrategyPoint x, double b_lo, double b_hi,
                                           int max_iter, const Scales& sc, int& iterations) {
  const double target1 = sys.params().excess_return();
  const double target2 = sys.params().full_reinsurance_price();
  auto e = sys.evaluate(x.xi, x.b);
  double f1 = e.v1 - target1, f2 = e.v2 - target2;
  double phi = merit(f1, f2, sc);
  for (int it = 0; it < max_iter; ++it) {
    iterations = it;
    if (converged(f1, f2, sc)) return x;
    const double det = e.j11 * e.j22 - e.j12 * e.j12;
    if (!(det > 0.0) || !std::isfinite(det)) return std::nullopt;
    const double dxi = -(e.j22 * f1 - e.j12 * f2) / det;
    const double db = -(-e.j12 * f1 + e.j11 * f2) / det;
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 50; ++half, step *= 0.5) {
      const StrategyPoint y{x.xi + step * dxi, x.b + step * db};
      if (!(y.b > b_lo && y.b < b_hi)) continue;
      auto ey = sys.evaluate(y.xi, y.b);
      const double g1 = ey.v1 - target1, g2 = ey.v2 - target2;
      const double phy = merit(g1, g2, sc);
      if (std::isfinite(phy) && phy < (1.0 - 1e-4 * step) * phi) {
        x = y;
        e = ey;
        f1 = g1;
        f2 = g2;
        phi = phy;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Stalled at rounding level: accept if already well inside the residual gate.
      if (std::abs(f1) <= 1e-10 * sc.s1 && std::abs(f2) <= 1e-10 * sc.s2) return x;
      return std::nullopt;
    }
  }
  if (converged(f1, f2, sc) || (std::abs(f1) <= 1e-10 * sc.s1 && std::abs(f2) <= 1e-10 * sc.s2)) return x;
  return std::nullopt;
}

// Outer safeguarded Newton/bisection on the profile derivative
// h(b) = v2(a(b), b) - P over a sign-changing bracket, inner scalar solve a(b).
StrategyPoint profile_root(const FocSystem& sys, double lo, double hi) {
  const double target2 = sys.params().full_reinsurance_price();
  auto h = [&](double b, double& dh, double& xi) {
    xi = sys.solve_xi(b);
    const auto e = sys.evaluate(xi, b);
    dh = e.j22 - e.j12 * e.j12 / e.j11;
    return e.v2 - target2;
  };
  double b = 0.5 * (lo + hi);
  double xi = 0.0, dh = 0.0;
  for (int it = 0; it < 400; ++it) {
    const double hb = h(b, dh, xi);
    if (hb == 0.0) return {xi, b};
    if (hb > 0.0)
      hi = b;
    else
      lo = b;
    if (std::abs(hb) <= 1e-12 * std::max(target2, 1.0)) return {xi, b};
    double next = b - hb / dh;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(b))) return {sys.solve_xi(next), next};
    b = next;
  }
  throw NoConvergence("nested bisection on the retention equation did not converge");
}

double profile_derivative(const FocSystem& sys, double b) {
  const double xi = sys.solve_xi(b);
  return sys.v2(xi, b) - sys.params().full_reinsurance_price();
}

// Unconstrained root of the FOC system over R x (-inf, b_limit), if one exists.
std::optional<StrategyPoint> unconstrained_root(const FocSystem& sys, const FocOptions& opt, const Scales& sc,
                                                FocSolution& out) {
  const double b_lim = sys.b_limit();
  const StrategyPoint start{sys.params().excess_return() /
                                (sys.params().alpha * sys.params().sigma * sys.params().sigma * sys.discount()),
                            std::min(0.5, 0.5 * b_lim)};
  int iters = 0;
  if (auto r = damped_newton(sys, start, -kInf, b_lim, opt.max_iterations, sc, iters)) {
    out.iterations = iters;
    return r;
  }
  out.used_bisection = true;
  // Bracket the profile derivative; it tends to -P as b -> -inf.
  double lo = 0.0;
  for (int k = 0; k < 60 && profile_derivative(sys, lo) >= 0.0; ++k) lo = -std::ldexp(1.0, k);
  double hi = 1.0;
  bool found = false;
  for (int k = 1; k <= 60; ++k) {
    if (hi >= b_lim) break;
    const double h = profile_derivative(sys, hi);
    if (h > 0.0 || !std::isfinite(h)) {
      found = true;
      break;
    }
    lo = hi;
    hi = std::isfinite(b_lim) ? b_lim - (b_lim - 1.0) * std::ldexp(1.0, -k) : 2.0 * hi;
  }
  if (!found) return std::nullopt;
  return profile_root(sys, lo, hi);
}

void fill_residuals(const FocSystem& sys, FocSolution& s) {
  const auto e = sys.evaluate(s.z.xi, s.z.b);
  s.residual_v1 = e.v1 - sys.params().excess_return();
  s.residual_v2 = e.v2 - sys.params().full_reinsurance_price();
}

}  // namespace

FocSolution solve_foc(const FocSystem& sys, const FocOptions& opt) {
  const auto& p = sys.params();
  const double price = p.full_reinsurance_price();
  const Scales sc{std::max(std::abs(p.excess_return()), 1.0), std::max(price, 1.0)};
  FocSolution out;

  if (opt.search_unconstrained) {
    if (auto r = unconstrained_root(sys, opt, sc, out)) {
      out.unconstrained_root = r;
      out.A = sys.v2(r->xi, 0.0);
      out.B = sys.v2(r->xi, 1.0);
      if (price <= out.A + opt.clamp_tolerance) {
        out.regime = Regime::ClampedAtZero;
        out.z = {sys.solve_xi(0.0), 0.0};
      } else if (price >= out.B - opt.clamp_tolerance) {
        out.regime = Regime::ClampedAtOne;
        out.z = {sys.solve_xi(1.0), 1.0};
      } else {
        out.regime = Regime::Interior;
        out.z = *r;
      }
      fill_residuals(sys, out);
      return out;
    }
  }

  // Constrained path on b in [0, 1].
  const double a0 = sys.solve_xi(0.0);
  const double h0 = sys.v2(a0, 0.0) - price;
  if (h0 >= -opt.clamp_tolerance) {
    out.regime = Regime::ClampedAtZero;
    out.z = {a0, 0.0};
  } else {
    const double a1 = sys.solve_xi(1.0);
    const double h1 = sys.v2(a1, 1.0) - price;
    if (h1 <= opt.clamp_tolerance) {
      out.regime = Regime::ClampedAtOne;
      out.z = {a1, 1.0};
    } else {
      out.regime = Regime::Interior;
      const double b0 = std::clamp(-h0 / (h1 - h0), 0.05, 0.95);
      int iters = 0;
      auto r = damped_newton(sys, {sys.solve_xi(b0), b0}, 0.0, 1.0, opt.max_iterations, sc, iters);
      out.iterations = iters;
      if (!r) {
        out.used_bisection = true;
        r = profile_root(sys, 0.0, 1.0);
      }
      out.z = *r;
    }
  }
  out.A = sys.v2(out.z.xi, 0.0);
  out.B = sys.v2(out.z.xi, 1.0);
  fill_residuals(sys, out);
  return out;
}

void require_interior_investment(const StrategyPoint& z, const ModelParams& params) {
  const double cap = params.investment_cap > 0.0 ? params.investment_cap : default_investment_cap(params);
  if (std::abs(z.xi) >= 0.99 * cap) {
    std::ostringstream os;
    os << "optimal investment " << z.xi << " is within 1% of the investment cap K = " << cap
       << "; raise K so that the solution is interior";
    throw InvalidArgument(os.str());
  }
}

}  // namespace catre
