#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "catre/error.hpp"
#include "catre/filter.hpp"
#include "catre/foc.hpp"
#include "catre/foc_full.hpp"
#include "oracle.hpp"

using namespace catre;

namespace {

oracle::World world(double L, double rate = 0.1) {
  return {oracle::reference_params(L), oracle::exponential(rate), 1.0 / rate};
}

}  // namespace

TEST_CASE("golden points of the threshold sweep") {
  const auto f = ClaimFamily::exponential(0.1);
  const auto s100 = solve_foc_full(oracle::reference_params(100.0), f, 0.0);
  CHECK(s100.regime == Regime::Interior);
  CHECK(s100.xi_star == doctest::Approx(25.19).epsilon(0.05 / 25.19));
  CHECK(s100.xi_star == doctest::Approx(25.1908173).epsilon(1e-8));
  CHECK(s100.b_star == doctest::Approx(0.9158241298).epsilon(1e-8));

  const auto small = solve_foc_full(oracle::reference_params(1e-3), f, 0.0);
  CHECK(small.xi_star == doctest::Approx(-86.57).epsilon(0.1 / 86.57));
  CHECK(small.xi_star == doctest::Approx(-86.56460).epsilon(1e-7));
  CHECK(small.regime == Regime::ClampedAtOne);
  CHECK(small.b_star == 1.0);

  const auto big = solve_foc_full(oracle::reference_params(1e6), f, 0.0);
  CHECK(big.xi_star == doctest::Approx(37.5).epsilon(1e-12));
  CHECK(big.b_star == doctest::Approx(0.93).epsilon(0.01 / 0.93));
  CHECK(big.b_star == doctest::Approx(0.930955).epsilon(1e-6));
}

TEST_CASE("solver agrees with an independent minimization of gamma") {
  const auto f = ClaimFamily::exponential(0.1);
  for (double L : {0.5, 10.0, 50.0, 64.3526, 80.0, 100.0, 150.0, 300.0, 5000.0}) {
    const auto w = world(L);
    for (double t : {0.0, 0.6}) {
      const auto ref = oracle::solve(w, t);
      const auto s = solve_foc_full(w.params, f, t);
      CAPTURE(L);
      CAPTURE(t);
      CHECK(s.xi_star == doctest::Approx(ref.xi).epsilon(1e-8).scale(1.0));
      CHECK(s.b_star == doctest::Approx(ref.b).epsilon(1e-8).scale(1.0));
      if (s.regime == Regime::Interior) {
        const auto grad = oracle::gradient(w, t, s.xi_star, s.b_star);
        CHECK(std::abs(grad.dxi) < 1e-9);
        CHECK(std::abs(grad.db) < 1e-7);
      }
    }
  }
}

TEST_CASE("regime invariants against the clamp thresholds") {
  const auto f = ClaimFamily::exponential(0.1);
  for (double L : {1e-3, 1.0, 40.0, 64.0, 65.0, 100.0, 1e3, 1e6}) {
    const auto s = solve_foc_full(oracle::reference_params(L), f, 0.0);
    const double price = 350.0;
    CAPTURE(L);
    CHECK(s.A_F <= s.B_F);
    switch (s.regime) {
      case Regime::Interior:
        CHECK(s.A_F < price);
        CHECK(price < s.B_F);
        CHECK(std::abs(s.residuals[0]) < 1e-9);
        CHECK(std::abs(s.residuals[1]) < 1e-9);
        break;
      case Regime::ClampedAtZero:
        CHECK(price <= s.A_F);
        CHECK(s.b_star == 0.0);
        break;
      case Regime::ClampedAtOne:
        CHECK(price >= s.B_F);
        CHECK(s.b_star == 1.0);
        break;
    }
  }
}

TEST_CASE("clamped at zero when reinsurance is cheap") {
  ModelParams p = oracle::reference_params(100.0);
  p.theta = 1.3;
  p.eta = 1.25;
  p.kappa = 5.0;  // price (1 + theta) kappa = 11.5, far below lambda E[Y] = 100
  const auto s = solve_foc_full(p, ClaimFamily::exponential(0.1), 0.0);
  CHECK(s.regime == Regime::ClampedAtZero);
  CHECK(s.b_star == 0.0);
  const auto ref = oracle::solve({p, oracle::exponential(0.1), 10.0}, 0.0);
  CHECK(ref.b == 0.0);
  CHECK(s.xi_star == doctest::Approx(ref.xi).epsilon(1e-9));
}

TEST_CASE("first-order condition components") {
  const auto f = ClaimFamily::exponential(0.1);
  const ModelParams p = oracle::reference_params(100.0);
  const FamilyMoments src(f, 100.0);
  const FocSystem sys(p, 0.0, src);
  CHECK(sys.v1(0.0, 0.0) == doctest::Approx(10.0 * std::exp(-10.0) * 0.5).epsilon(1e-12));
  CHECK(sys.v2(0.0, 0.0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(sys.v2(10.0, 1.0) > sys.v2(10.0, 0.0));
  CHECK(sys.v1(25.19, 0.93) == doctest::Approx(0.3).epsilon(2e-2 / 0.3));

  const FamilyMoments far(f, 1e300);
  const FocSystem sys_far(p, 0.0, far);
  CHECK(sys_far.v1(12.0, 0.4) == doctest::Approx(p.alpha * p.sigma * p.sigma * 12.0).epsilon(1e-14));
  CHECK(sys_far.v2(-30.0, 0.0) == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(sys_far.v2(30.0, 0.0) == doctest::Approx(100.0).epsilon(1e-12));

  // Analytic Jacobian against central differences of v1, v2.
  const double h = 1e-5;
  for (auto [xi, b] : {std::pair{25.0, 0.9}, std::pair{-40.0, 0.3}, std::pair{3.0, 0.99}}) {
    const auto e = sys.evaluate(xi, b);
    CHECK(e.j11 == doctest::Approx((sys.v1(xi + h, b) - sys.v1(xi - h, b)) / (2 * h)).epsilon(1e-6));
    CHECK(e.j12 == doctest::Approx((sys.v1(xi, b + h) - sys.v1(xi, b - h)) / (2 * h)).epsilon(1e-6));
    CHECK(e.j12 == doctest::Approx((sys.v2(xi + h, b) - sys.v2(xi - h, b)) / (2 * h)).epsilon(1e-6));
    CHECK(e.j22 == doctest::Approx((sys.v2(xi, b + h) - sys.v2(xi, b - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("gamma over g matches the direct formula") {
  const auto w = world(80.0);
  const FamilyMoments src(ClaimFamily::exponential(0.1), 80.0);
  const FocSystem sys(w.params, 0.2, src);
  for (auto [xi, b] : {std::pair{25.0, 0.9}, std::pair{-40.0, 0.3}, std::pair{0.0, 0.0}}) {
    CHECK(sys.gamma_over_g(xi, b) == doctest::Approx(oracle::gamma_over_g(w, 0.2, xi, b)).epsilon(1e-11));
  }
}

TEST_CASE("independent case") {
  const ModelParams p = oracle::reference_params();
  CHECK(independent_case_investment(p, 0.0) == doctest::Approx(37.5).epsilon(1e-15));
  CHECK(independent_case_investment(p, 0.9) == independent_case_investment(p, 0.0));
  ModelParams q = p;
  q.r = 0.02;
  q.mu = 0.32;
  CHECK(independent_case_investment(q, 0.0) == doctest::Approx(37.5 * std::exp(-0.02)).epsilon(1e-14));

  const ClaimMixture mix({ClaimFamily::exponential(0.2), ClaimFamily::exponential(0.1)});
  for (std::size_t j = 0; j < 2; ++j) {
    const auto z = independent_case_strategy(p, mix, 0.0, FilterState::corner(2, j));
    ModelParams far = p;
    far.dependence_threshold = 1e300;
    const auto full = solve_foc_full(far, mix[j], 0.0);
    CHECK(z.xi == doctest::Approx(37.5));
    CHECK(z.b == doctest::Approx(full.b_star).epsilon(1e-9));
  }
}

TEST_CASE("mean model solve equals the single family when weights pick one") {
  const ClaimMixture mix({ClaimFamily::exponential(0.2), ClaimFamily::exponential(0.1)});
  const ModelParams p = oracle::reference_params(100.0);
  const std::vector<double> w{0.0, 1.0};
  const auto a = solve_foc_full(p, mix, w, 0.0);
  const auto b = solve_foc_full(p, mix[1], 0.0);
  CHECK(a.xi_star == doctest::Approx(b.xi_star).epsilon(1e-12));
  CHECK(a.b_star == doctest::Approx(b.b_star).epsilon(1e-12));
}

TEST_CASE("hessian of gamma is positive definite") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto f = ClaimFamily::exponential(0.1);
  for (int k = 0; k < 20; ++k) {
    const double L = std::pow(10.0, -2.0 + 6.0 * U(rng));
    const ModelParams p = oracle::reference_params(L);
    const FamilyMoments src(f, L);
    const FocSystem sys(p, U(rng), src);
    const double xi = -100.0 + 200.0 * U(rng), b = U(rng);
    const auto e = sys.evaluate(xi, b);
    CHECK(e.j11 > 0.0);
    CHECK(e.j11 * e.j22 - e.j12 * e.j12 > 0.0);
  }
}

TEST_CASE("invalid inputs") {
  ModelParams p = oracle::reference_params();
  CHECK_THROWS_AS(solve_foc_full(p, ClaimFamily::exponential(0.04), 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_foc_full(p, ClaimFamily::exponential(0.1), 2.0), InvalidArgument);
}
