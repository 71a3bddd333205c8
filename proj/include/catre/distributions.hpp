#pragma once

// Claim-size families, the stock-drop law, and the exponentially tilted
// integrals consumed by the first-order-condition solvers.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace catre {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Region { BelowL, AboveL, All };

/// A claim-size law on (0, inf) with a density.
///
/// Two kinds are supported: the exponential law with rate rho, and a density
/// tabulated on a strictly increasing grid (linear between grid points, zero
/// outside). Tabulated densities must integrate to one within 1e-8.
class ClaimFamily {
 public:
  enum class Kind { Exponential, Tabulated };

  static ClaimFamily exponential(double rate);
  static ClaimFamily tabulated(std::vector<double> y, std::vector<double> f, bool normalize = false);
  /// Two-column CSV (y, f(y)); a non-numeric first row is treated as a header.
  static ClaimFamily tabulated_from_csv(const std::string& path, bool normalize = false);

  Kind kind() const noexcept { return kind_; }
  double rate() const;  // exponential only

  double density(double y) const;
  double cdf(double y) const;
  double survival(double y) const { return 1.0 - cdf(y); }
  /// Inverse of cdf, for u in [0, 1).
  double quantile(double u) const;
  double mean() const noexcept { return mean_; }

  /// Supremum of tilts s with finite MGF.
  double tilt_limit() const noexcept;
  /// Right end of the support (inf for the exponential kind).
  double support_upper() const noexcept;
  double support_lower() const noexcept;

  std::span<const double> grid() const noexcept { return grid_y_; }
  std::span<const double> grid_density() const noexcept { return grid_f_; }

  std::string describe() const;

 private:
  ClaimFamily() = default;

  Kind kind_ = Kind::Exponential;
  double rate_ = 1.0;
  std::vector<double> grid_y_;
  std::vector<double> grid_f_;
  std::vector<double> grid_cdf_;
  double mean_ = 1.0;
};

/// Ordered family {F_1, ..., F_m} indexed by the unknown parameter.
class ClaimMixture {
 public:
  explicit ClaimMixture(std::vector<ClaimFamily> families);

  std::size_t size() const noexcept { return families_.size(); }
  const ClaimFamily& operator[](std::size_t j) const { return families_.at(j); }
  const std::vector<ClaimFamily>& families() const noexcept { return families_; }

  double min_tilt_limit() const noexcept;

  /// F_1(x) >= F_2(x) >= ... >= F_m(x) on a validation grid.
  bool stochastically_ordered() const;
  void require_stochastic_order() const;

 private:
  std::vector<ClaimFamily> families_;
};

/// Law of the relative stock drop Z on (0, 1).
class JumpLaw {
 public:
  enum class Kind { UniformOn01, TabulatedOn01 };

  static JumpLaw uniform();
  static JumpLaw tabulated(std::vector<double> z, std::vector<double> f, bool normalize = false);

  Kind kind() const noexcept { return kind_; }
  double mean() const { return mgf(0.0, 1); }
  double quantile(double u) const;

  /// E[Z^order e^{uZ}] for order in {0, 1, 2}.
  double mgf(double u, int order) const;

  std::string describe() const;

 private:
  JumpLaw() = default;

  Kind kind_ = Kind::UniformOn01;
  std::vector<double> grid_z_;
  std::vector<double> grid_f_;
  std::vector<double> grid_cdf_;
};

/// ∫_lo^hi y^order e^{s y} f(y) dy. Closed form for the exponential kind,
/// adaptive quadrature otherwise. Throws DivergentIntegral when hi is
/// unbounded and s is not below the family's tilt limit.
double tilted_moment(const ClaimFamily& family, int order, double s, double lo, double hi);

/// ∫_L^inf e^{s y} f(y) dy.
double tilted_tail_mass(const ClaimFamily& family, double s, double L);

/// ∫ y e^{s y} f(y) dy over the region split at L.
double tilted_mean(const ClaimFamily& family, double s, double L, Region region);

double jump_mgf(const JumpLaw& law, double u, int order);

namespace numeric {

/// Density-only quadrature path for the tilted moments (the independent
/// route used to check the closed forms). Integrates panel by panel until the
/// contribution of a panel falls below 1e-16 of the running total.
double tilted_moment(const ClaimFamily& family, int order, double s, double lo, double hi);

/// Adaptive Gauss-Kronrod (15 point) on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10);

}  // namespace numeric

}  // namespace catre
