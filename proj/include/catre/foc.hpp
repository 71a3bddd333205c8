#pragma once

// First-order conditions of the convex function gamma(xi, b) at a fixed
// (t, p), shared by the full-information and the Bayesian solvers.
//
// Both solvers reduce to the same algebra once the claim measure entering
// gamma is fixed: for the full-information case it is the claim density f,
// for the Bayesian case it is sum_k p_k g(t, J(p, y)) / g(t, p) f_k(y). A
// MomentSource supplies the tilted moments of that measure on (0, L) and
// (L, inf); FocSystem evaluates v1, v2, their Jacobian, and gamma / g.

#include <array>
#include <optional>
#include <string>

#include "catre/market.hpp"

namespace catre {

/// ∫ y^n e^{s y} G(y) dy for n = 0, 1, 2, split at the dependence threshold.
struct TiltedMoments {
  std::array<double, 3> below{};  // over (0, L)
  std::array<double, 3> above{};  // over (L, inf)
};

class MomentSource {
 public:
  virtual ~MomentSource() = default;
  virtual TiltedMoments moments(double s) const = 0;
  /// Tilts s at or above this value are outside the source's domain.
  virtual double tilt_limit() const = 0;
};

/// Moments of a weighted family mixture sum_k w_k f_k (closed form for
/// exponential families). With a unit weight vector this is one family.
class FamilyMoments final : public MomentSource {
 public:
  FamilyMoments(const ClaimMixture& mixture, std::vector<double> weights, double threshold);
  FamilyMoments(const ClaimFamily& family, double threshold);

  TiltedMoments moments(double s) const override;
  double tilt_limit() const override { return tilt_limit_; }

 private:
  std::vector<ClaimFamily> families_;
  std::vector<double> weights_;
  double threshold_;
  double tilt_limit_;
};

enum class Regime { Interior, ClampedAtZero, ClampedAtOne };

std::string to_string(Regime regime);

struct FocOptions {
  int max_iterations = 100;
  double clamp_tolerance = 1e-9;  // on (1 + theta) kappa vs A, B
  /// Search the unconstrained root r = (r1, r2) over b in R and classify
  /// through A = v2(r1, 0), B = v2(r1, 1). When false (or when no root exists
  /// inside the tilt domain), b is restricted to [0, 1] and the regime comes
  /// from the profile derivative v2(a(b), b) - (1 + theta) kappa at b = 0, 1.
  bool search_unconstrained = true;
};

struct FocSolution {
  StrategyPoint z;
  Regime regime = Regime::Interior;
  double A = 0.0;
  double B = 0.0;
  double residual_v1 = 0.0;  // v1(z) - (mu - r)
  double residual_v2 = 0.0;  // v2(z) - (1 + theta) kappa; inactive when clamped
  std::optional<StrategyPoint> unconstrained_root;
  int iterations = 0;
  bool used_bisection = false;
};

class FocSystem {
 public:
  FocSystem(const ModelParams& params, double t, const MomentSource& source);

  struct Eval {
    double v1, v2;
    double j11, j12, j22;  // symmetric Jacobian of (v1, v2) in (xi, b)
  };

  Eval evaluate(double xi, double b) const;
  double v1(double xi, double b) const;
  double v2(double xi, double b) const;
  /// gamma(t, p, xi, b) / g(t, p).
  double gamma_over_g(double xi, double b) const;
  /// L g(t, p; xi, b) / g(t, p) = -lambda + alpha e (theta - eta) kappa + gamma / g.
  double generator_over_g(double xi, double b) const;

  /// a(b): the unique root in xi of v1(xi, b) = mu - r.
  double solve_xi(double b) const;

  double discount() const noexcept { return discount_; }
  double tilt(double b) const noexcept { return params_.alpha * discount_ * b; }
  /// Largest b whose tilt stays in the source's domain.
  double b_limit() const noexcept;
  const ModelParams& params() const noexcept { return params_; }

 private:
  const ModelParams& params_;
  const MomentSource& source_;
  double discount_;
};

/// Minimizer of gamma over R x [0, 1] with regime classification.
FocSolution solve_foc(const FocSystem& system, const FocOptions& options = {});

/// Loud failure when |xi| comes within 1% of the investment cap K.
void require_interior_investment(const StrategyPoint& z, const ModelParams& params);

}  // namespace catre
