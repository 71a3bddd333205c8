#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "catre/distributions.hpp"
#include "catre/error.hpp"
#include "oracle.hpp"

using namespace catre;

TEST_CASE("exponential tail mass and tilted means") {
  const auto f = ClaimFamily::exponential(0.1);
  CHECK(tilted_tail_mass(f, 0.0, 100.0) == doctest::Approx(std::exp(-10.0)).epsilon(1e-14));
  CHECK(tilted_tail_mass(f, 0.0, 100.0) == doctest::Approx(4.54e-5).epsilon(1e-3));
  CHECK(tilted_tail_mass(f, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tilted_tail_mass(f, 0.05, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(tilted_mean(f, 0.0, 100.0, Region::All) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(tilted_mean(f, 0.05, 100.0, Region::All) == doctest::Approx(40.0).epsilon(1e-14));
  for (double L : {0.01, 3.0, 100.0, 1e4}) {
    const double sum = tilted_mean(f, 0.02, L, Region::BelowL) + tilted_mean(f, 0.02, L, Region::AboveL);
    CHECK(sum == doctest::Approx(tilted_mean(f, 0.02, L, Region::All)).epsilon(1e-13));
  }
}

TEST_CASE("closed-form tilted moments agree with direct quadrature of the density") {
  for (double rate : {0.1, 0.5, 2.0}) {
    const auto f = ClaimFamily::exponential(rate);
    const auto dens = oracle::exponential(rate);
    for (double frac : {0.0, 0.3, 0.9}) {
      const double s = frac * rate;
      for (int n = 0; n <= 2; ++n) {
        for (double lo : {0.0, 1.0, 20.0}) {
          auto integrand = [&](double y) { return std::pow(y, n) * std::exp(s * y) * dens(y); };
          const double ref = oracle::integrate(integrand, lo, kInf);
          CAPTURE(rate);
          CAPTURE(s);
          CAPTURE(n);
          CAPTURE(lo);
          CHECK(tilted_moment(f, n, s, lo, kInf) == doctest::Approx(ref).epsilon(1e-10));
          CHECK(numeric::tilted_moment(f, n, s, lo, kInf) == doctest::Approx(ref).epsilon(1e-8));
          const double ref_finite = oracle::integrate(integrand, lo, lo + 7.5);
          CHECK(tilted_moment(f, n, s, lo, lo + 7.5) == doctest::Approx(ref_finite).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("tilts at or above the decay rate are rejected") {
  const auto f = ClaimFamily::exponential(0.1);
  CHECK(f.tilt_limit() == doctest::Approx(0.1));
  CHECK_THROWS_AS(tilted_moment(f, 0, 0.1, 0.0, kInf), DivergentIntegral);
  CHECK_THROWS_AS(tilted_moment(f, 1, 0.2, 5.0, kInf), DivergentIntegral);
  CHECK_NOTHROW(tilted_moment(f, 1, 0.2, 0.0, 50.0));
}

TEST_CASE("family construction validates its inputs") {
  CHECK_THROWS_AS(ClaimFamily::exponential(0.0), InvalidArgument);
  CHECK_THROWS_AS(ClaimFamily::exponential(-1.0), InvalidArgument);
  CHECK_THROWS_AS(ClaimFamily::tabulated({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(ClaimFamily::tabulated({0.0, 1.0}, {1.0, -1.0}), InvalidArgument);
  CHECK_NOTHROW(ClaimFamily::tabulated({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}, true));
}

TEST_CASE("tabulated family: triangular density on (0, 2)") {
  const auto f = ClaimFamily::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK(f.mean() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.density(0.5) == doctest::Approx(0.5));
  CHECK(f.density(3.0) == 0.0);
  CHECK(f.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.cdf(0.5) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(f.tilt_limit() == kInf);
  // E[Y^2 e^{sY}] against an explicit Boost integral of the triangle.
  auto tri = [](double y) { return y < 1.0 ? y : 2.0 - y; };
  const double s = 0.7;
  const double ref = oracle::integrate([&](double y) { return y * y * std::exp(s * y) * tri(y); }, 0.0, 1.0) +
                     oracle::integrate([&](double y) { return y * y * std::exp(s * y) * tri(y); }, 1.0, 2.0);
  CHECK(tilted_moment(f, 2, s, 0.0, kInf) == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("quantiles invert the distribution function") {
  const auto e = ClaimFamily::exponential(0.25);
  const auto t = ClaimFamily::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  for (double u : {1e-6, 0.1, 0.5, 0.77, 0.999}) {
    CHECK(e.cdf(e.quantile(u)) == doctest::Approx(u).epsilon(1e-12));
    CHECK(t.cdf(t.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
  }
  CHECK(JumpLaw::uniform().quantile(0.3) == 0.3);
}

TEST_CASE("uniform drop law moment generating function") {
  const auto z = JumpLaw::uniform();
  CHECK(z.mgf(0.0, 0) == doctest::Approx(1.0));
  CHECK(z.mgf(0.0, 1) == doctest::Approx(0.5));
  CHECK(z.mgf(1.0, 0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  for (double u : {-3.0, -0.5, -1e-6, 0.0, 2e-5, 0.9, 4.0}) {
    for (int k = 0; k <= 2; ++k) {
      const double ref = oracle::integrate([&](double x) { return std::pow(x, k) * std::exp(u * x); }, 0.0, 1.0);
      CAPTURE(u);
      CAPTURE(k);
      CHECK(jump_mgf(z, u, k) == doctest::Approx(ref).epsilon(1e-13));
    }
    // Cauchy-Schwarz for the log-convexity of the transform.
    CHECK(z.mgf(u, 2) * z.mgf(u, 0) >= z.mgf(u, 1) * z.mgf(u, 1));
  }
}

TEST_CASE("tabulated drop law") {
  const auto z = JumpLaw::tabulated({0.0, 0.5, 1.0}, {0.0, 2.0, 0.0}, true);
  CHECK(z.mean() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z.mgf(0.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z.quantile(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(JumpLaw::tabulated({0.0, 1.5}, {1.0, 1.0}, true), InvalidArgument);
}

TEST_CASE("stochastic order of exponential mixtures") {
  const ClaimMixture ordered({ClaimFamily::exponential(0.2), ClaimFamily::exponential(0.1)});
  const ClaimMixture reversed({ClaimFamily::exponential(0.1), ClaimFamily::exponential(0.2)});
  CHECK(ordered.stochastically_ordered());
  CHECK_FALSE(reversed.stochastically_ordered());
  CHECK_NOTHROW(ordered.require_stochastic_order());
  CHECK_THROWS_AS(reversed.require_stochastic_order(), InvalidArgument);
  CHECK(ordered.min_tilt_limit() == doctest::Approx(0.1));
  CHECK_THROWS_AS(ClaimMixture({}), InvalidArgument);
}
