#include "catre/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "catre/error.hpp"

namespace catre {

namespace {

constexpr double kNormalizationTol = 1e-8;

double factorial_ratio(int n, int j) {  // n! / (n - j)!
  double r = 1.0;
  for (int i = 0; i < j; ++i) r *= n - i;
  return r;
}

// ∫_lo^hi y^n e^{c y} dy for finite bounds, c of either sign.
double power_exp_integral_finite(int n, double c, double lo, double hi) {
  if (hi <= lo) return 0.0;
  if (std::abs(c) * std::max(std::abs(lo), std::abs(hi)) <= 2.0) {
    // Power series in c; terms decay factorially once i > 2.
    double sum = 0.0;
    double ci = 1.0;  // c^i / i!
    for (int i = 0; i < 200; ++i) {
      const int p = n + i + 1;
      const double term = ci * (std::pow(hi, p) - std::pow(lo, p)) / p;
      sum += term;
      if (i > 4 && std::abs(term) <= 1e-17 * std::abs(sum)) break;
      ci *= c / (i + 1);
    }
    return sum;
  }
  if (c < 0.0) {
    const double k = -c;
    auto tail = [&](double a) {
      double s = 0.0;
      for (int j = 0; j <= n; ++j) s += factorial_ratio(n, j) * std::pow(a, n - j) / std::pow(k, j + 1);
      return std::exp(-k * a) * s;
    };
    return tail(lo) - tail(hi);
  }
  auto antiderivative = [&](double y) {
    double s = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      s += sign * factorial_ratio(n, j) * std::pow(y, n - j) / std::pow(c, j + 1);
    }
    return std::exp(c * y) * s;
  };
  return antiderivative(hi) - antiderivative(lo);
}

// ∫_lo^inf y^n e^{-k y} dy, k > 0.
double power_exp_tail(int n, double k, double lo) {
  double s = 0.0;
  for (int j = 0; j <= n; ++j) s += factorial_ratio(n, j) * std::pow(lo, n - j) / std::pow(k, j + 1);
  return std::exp(-k * lo) * s;
}

double trapezoid(std::span<const double> x, std::span<const double> f) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

void validate_grid(const std::vector<double>& x, const std::vector<double>& f, const char* what) {
  if (x.size() != f.size() || x.size() < 2)
    throw InvalidArgument(std::string(what) + ": need at least two (x, f) points of equal count");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(f[i]))
      throw InvalidArgument(std::string(what) + ": non-finite grid entry");
    if (f[i] < 0.0) throw InvalidArgument(std::string(what) + ": negative density value");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw InvalidArgument(std::string(what) + ": grid must be strictly increasing");
  }
}

double linear_interp(std::span<const double> x, std::span<const double> f, double at) {
  if (at < x.front() || at > x.back()) return 0.0;
  auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.end()) return f.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return f[i - 1] + w * (f[i] - f[i - 1]);
}

// Sum of segment integrals of g(y) * linear density over [lo, hi].
double integrate_over_grid(std::span<const double> x, std::span<const double> f, double lo, double hi,
                           const std::function<double(double)>& weight) {
  double total = 0.0;
  lo = std::max(lo, x.front());
  hi = std::min(hi, x.back());
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double a = std::max(lo, x[i - 1]);
    const double b = std::min(hi, x[i]);
    if (b <= a) continue;
    const double x0 = x[i - 1], x1 = x[i], f0 = f[i - 1], f1 = f[i];
    auto integrand = [&](double y) {
      const double dens = f0 + (y - x0) / (x1 - x0) * (f1 - f0);
      return weight(y) * dens;
    };
    total += numeric::integrate(integrand, a, b);
  }
  return total;
}

// Inverse of the cumulative trapezoid integral of a piecewise-linear density.
double piecewise_linear_quantile(const std::vector<double>& x, const std::vector<double>& f,
                                 const std::vector<double>& cum, double u) {
  const double target = std::clamp(u, 0.0, 1.0) * cum.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), target);
  if (it == cum.begin()) return x.front();
  if (it == cum.end()) return x.back();
  const std::size_t i = static_cast<std::size_t>(it - cum.begin()) - 1;
  const double dx = x[i + 1] - x[i];
  const double a = 0.5 * (f[i + 1] - f[i]) / dx;
  const double b = f[i];
  const double c = cum[i] - target;
  double h;
  if (std::abs(a) * dx < 1e-12 * std::max(b, 1e-300)) {
    h = b > 0.0 ? -c / b : 0.0;
  } else {
    h = -2.0 * c / (b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c)));
  }
  return x[i] + std::clamp(h, 0.0, dx);
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& f) {
  std::vector<double> cum(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) cum[i] = cum[i - 1] + 0.5 * (f[i - 1] + f[i]) * (x[i] - x[i - 1]);
  return cum;
}

}  // namespace

// ---------------------------------------------------------------- ClaimFamily

ClaimFamily ClaimFamily::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidArgument("exponential claim rate must be positive");
  ClaimFamily fam;
  fam.kind_ = Kind::Exponential;
  fam.rate_ = rate;
  fam.mean_ = 1.0 / rate;
  return fam;
}

ClaimFamily ClaimFamily::tabulated(std::vector<double> y, std::vector<double> f, bool normalize) {
  validate_grid(y, f, "tabulated claim density");
  if (y.front() < 0.0) throw InvalidArgument("tabulated claim density: support must lie in [0, inf)");
  const double mass = trapezoid(y, f);
  if (!(mass > 0.0)) throw InvalidArgument("tabulated claim density has zero mass");
  if (normalize) {
    for (double& v : f) v /= mass;
  } else if (std::abs(mass - 1.0) > kNormalizationTol) {
    std::ostringstream os;
    os << "tabulated claim density integrates to " << mass << ", not 1";
    throw InvalidArgument(os.str());
  }
  ClaimFamily fam;
  fam.kind_ = Kind::Tabulated;
  fam.grid_y_ = std::move(y);
  fam.grid_f_ = std::move(f);
  fam.grid_cdf_.assign(fam.grid_y_.size(), 0.0);
  double m1 = 0.0;
  for (std::size_t i = 1; i < fam.grid_y_.size(); ++i) {
    const double h = fam.grid_y_[i] - fam.grid_y_[i - 1];
    const double f0 = fam.grid_f_[i - 1], f1 = fam.grid_f_[i];
    fam.grid_cdf_[i] = fam.grid_cdf_[i - 1] + 0.5 * (f0 + f1) * h;
    // ∫ y (linear density) over the segment, exact.
    const double y0 = fam.grid_y_[i - 1];
    m1 += h * (f0 * (y0 / 2 + h / 6) + f1 * (y0 / 2 + h / 3));
  }
  fam.mean_ = m1 / fam.grid_cdf_.back();
  if (!(fam.mean_ > 0.0)) throw InvalidArgument("tabulated claim density must have a positive mean");
  return fam;
}

ClaimFamily ClaimFamily::tabulated_from_csv(const std::string& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open claim density file '" + path + "'");
  std::vector<double> y, f;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0, b = 0;
    if (!(ls >> a >> b)) {
      if (y.empty() && lineno == 1) continue;  // header
      throw IoError(path + ":" + std::to_string(lineno) + ": expected two numeric columns");
    }
    y.push_back(a);
    f.push_back(b);
  }
  return tabulated(std::move(y), std::move(f), normalize);
}

double ClaimFamily::rate() const {
  if (kind_ != Kind::Exponential) throw InvalidArgument("rate() requested from a tabulated family");
  return rate_;
}

double ClaimFamily::density(double y) const {
  if (kind_ == Kind::Exponential) return y < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * y);
  return linear_interp(grid_y_, grid_f_, y);
}

double ClaimFamily::cdf(double y) const {
  if (kind_ == Kind::Exponential) return y <= 0.0 ? 0.0 : -std::expm1(-rate_ * y);
  if (y <= grid_y_.front()) return 0.0;
  if (y >= grid_y_.back()) return 1.0;
  auto it = std::upper_bound(grid_y_.begin(), grid_y_.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - grid_y_.begin());
  const double h = y - grid_y_[i - 1];
  const double fy = density(y);
  return std::min(1.0, grid_cdf_[i - 1] + 0.5 * (grid_f_[i - 1] + fy) * h);
}

double ClaimFamily::tilt_limit() const noexcept { return kind_ == Kind::Exponential ? rate_ : kInf; }

double ClaimFamily::support_upper() const noexcept {
  return kind_ == Kind::Exponential ? kInf : grid_y_.back();
}

double ClaimFamily::support_lower() const noexcept {
  return kind_ == Kind::Exponential ? 0.0 : grid_y_.front();
}

std::string ClaimFamily::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Exponential)
    os << "Exp(" << rate_ << ")";
  else
    os << "Tabulated(" << grid_y_.size() << " points on [" << grid_y_.front() << ", " << grid_y_.back() << "])";
  return os.str();
}

// ---------------------------------------------------------------- ClaimMixture

ClaimMixture::ClaimMixture(std::vector<ClaimFamily> families) : families_(std::move(families)) {
  if (families_.empty()) throw InvalidArgument("claim mixture needs at least one family");
}

double ClaimMixture::min_tilt_limit() const noexcept {
  double lim = kInf;
  for (const auto& f : families_) lim = std::min(lim, f.tilt_limit());
  return lim;
}

bool ClaimMixture::stochastically_ordered() const {
  if (families_.size() < 2) return true;
  double upper = 0.0;
  for (const auto& f : families_)
    upper = std::max(upper, std::isfinite(f.support_upper()) ? f.support_upper() : 60.0 * f.mean());
  constexpr int kPoints = 4000;
  for (int i = 0; i <= kPoints; ++i) {
    const double x = upper * i / kPoints;
    for (std::size_t j = 0; j + 1 < families_.size(); ++j)
      if (families_[j].cdf(x) < families_[j + 1].cdf(x) - 1e-12) return false;
  }
  return true;
}

void ClaimMixture::require_stochastic_order() const {
  if (!stochastically_ordered())
    throw InvalidArgument("claim families are not ordered F_1 >= F_2 >= ... >= F_m (usual stochastic order)");
}

// ---------------------------------------------------------------- JumpLaw

double ClaimFamily::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw InvalidArgument("quantile level must lie in [0, 1)");
  if (kind_ == Kind::Exponential) return -std::log1p(-u) / rate_;
  return piecewise_linear_quantile(grid_y_, grid_f_, grid_cdf_, u);
}

JumpLaw JumpLaw::uniform() { return JumpLaw{}; }

double JumpLaw::quantile(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw InvalidArgument("quantile level must lie in [0, 1)");
  if (kind_ == Kind::UniformOn01) return u;
  return piecewise_linear_quantile(grid_z_, grid_f_, grid_cdf_, u);
}

JumpLaw JumpLaw::tabulated(std::vector<double> z, std::vector<double> f, bool normalize) {
  validate_grid(z, f, "tabulated jump law");
  if (z.front() < 0.0 || z.back() > 1.0) throw InvalidArgument("tabulated jump law: support must lie in [0, 1]");
  const double mass = trapezoid(z, f);
  if (!(mass > 0.0)) throw InvalidArgument("tabulated jump law has zero mass");
  if (normalize) {
    for (double& v : f) v /= mass;
  } else if (std::abs(mass - 1.0) > kNormalizationTol) {
    throw InvalidArgument("tabulated jump density does not integrate to 1");
  }
  JumpLaw law;
  law.kind_ = Kind::TabulatedOn01;
  law.grid_z_ = std::move(z);
  law.grid_f_ = std::move(f);
  law.grid_cdf_ = cumulative_trapezoid(law.grid_z_, law.grid_f_);
  const double ez = law.mean();
  if (!(ez > 0.0 && ez < 1.0)) throw InvalidArgument("tabulated jump law must have E[Z] in (0, 1)");
  return law;
}

double JumpLaw::mgf(double u, int order) const {
  if (order < 0 || order > 2) throw InvalidArgument("jump MGF order must be 0, 1 or 2");
  if (kind_ == Kind::TabulatedOn01) {
    return integrate_over_grid(grid_z_, grid_f_, 0.0, 1.0,
                               [&](double z) { return std::pow(z, order) * std::exp(u * z); });
  }
  if (std::abs(u) < 1.0) {
    // ∫_0^1 z^n e^{uz} dz = sum_k u^k / (k! (n + k + 1)).
    double sum = 0.0, uk = 1.0;
    for (int k = 0; k < 40; ++k) {
      const double term = uk / (order + k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      uk *= u / (k + 1);
    }
    return sum;
  }
  const double eu = std::exp(u);
  switch (order) {
    case 0:
      return std::expm1(u) / u;
    case 1:
      return (eu * (u - 1.0) + 1.0) / (u * u);
    default:
      return (eu * (u * u - 2.0 * u + 2.0) - 2.0) / (u * u * u);
  }
}

std::string JumpLaw::describe() const {
  return kind_ == Kind::UniformOn01 ? "Uniform(0,1)"
                                    : "Tabulated(" + std::to_string(grid_z_.size()) + " points on (0,1))";
}

double jump_mgf(const JumpLaw& law, double u, int order) { return law.mgf(u, order); }

// ---------------------------------------------------------------- tilted integrals

double tilted_moment(const ClaimFamily& family, int order, double s, double lo, double hi) {
  if (order < 0 || order > 2) throw InvalidArgument("tilted moment order must be 0, 1 or 2");
  lo = std::max(lo, 0.0);
  if (hi <= lo) return 0.0;
  if (family.kind() == ClaimFamily::Kind::Exponential) {
    const double rho = family.rate();
    if (!std::isfinite(hi)) {
      if (!(s < rho)) {
        std::ostringstream os;
        os << "tilt " << s << " is not below the exponential rate " << rho;
        throw DivergentIntegral(os.str());
      }
      return rho * power_exp_tail(order, rho - s, lo);
    }
    return rho * power_exp_integral_finite(order, s - rho, lo, hi);
  }
  return integrate_over_grid(family.grid(), family.grid_density(), lo, hi,
                             [&](double y) { return std::pow(y, order) * std::exp(s * y); });
}

double tilted_tail_mass(const ClaimFamily& family, double s, double L) {
  return tilted_moment(family, 0, s, L, kInf);
}

double tilted_mean(const ClaimFamily& family, double s, double L, Region region) {
  switch (region) {
    case Region::BelowL:
      return tilted_moment(family, 1, s, 0.0, L);
    case Region::AboveL:
      return tilted_moment(family, 1, s, L, kInf);
    case Region::All:
    default:
      return tilted_moment(family, 1, s, 0.0, kInf);
  }
}

namespace numeric {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (b <= a) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, rel_tol, &err);
}

double tilted_moment(const ClaimFamily& family, int order, double s, double lo, double hi) {
  lo = std::max(lo, family.support_lower());
  hi = std::min(hi, family.support_upper());
  if (hi <= lo) return 0.0;
  auto integrand = [&](double y) { return std::pow(y, order) * std::exp(s * y) * family.density(y); };

  if (family.kind() == ClaimFamily::Kind::Tabulated) {
    // Panels follow the grid so that the kinks of the density sit on panel ends.
    double total = 0.0;
    const auto g = family.grid();
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double a = std::max(lo, g[i - 1]), b = std::min(hi, g[i]);
      if (b > a) total += integrate(integrand, a, b);
    }
    return total;
  }

  double width = family.mean();
  double a = lo;
  double total = 0.0;
  int small_panels = 0;
  for (int panel = 0; panel < 600; ++panel) {
    const double b = std::min(hi, a + width);
    const double part = integrate(integrand, a, b);
    if (!std::isfinite(part) || !std::isfinite(total + part))
      throw DivergentIntegral("tilted integral overflowed; tail does not converge");
    total += part;
    if (b >= hi) return total;
    small_panels = (std::abs(part) <= 1e-16 * std::abs(total)) ? small_panels + 1 : 0;
    if (small_panels >= 2) return total;
    a = b;
    width *= 1.1;
  }
  throw DivergentIntegral("tilted integral tail did not converge within the panel budget");
}

}  // namespace numeric

}  // namespace catre
