#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "catre/error.hpp"
#include "catre/market.hpp"
#include "oracle.hpp"

using namespace catre;

TEST_CASE("net income rate") {
  ModelParams p = oracle::reference_params();
  CHECK(net_income_rate(p, 1.0) == doctest::Approx((1.0 + p.eta) * p.kappa));
  CHECK(net_income_rate(p, 0.0) == doctest::Approx((p.eta - p.theta) * p.kappa));
  CHECK(net_income_rate(p, 0.0) < 0.0);
  p.eta = 2.0;  // (1 + eta) kappa = 300, (1 + theta) kappa = 350
  CHECK(net_income_rate(p, 0.5) == doctest::Approx(125.0).epsilon(1e-15));
  CHECK(p.full_reinsurance_price() == doctest::Approx(350.0));
}

TEST_CASE("discount factor") {
  ModelParams p = oracle::reference_params();
  CHECK(discount_factor(p, 0.3) == 1.0);
  p.r = 0.02;
  CHECK(discount_factor(p, p.horizon) == 1.0);
  CHECK(discount_factor(p, 0.0) == doctest::Approx(std::exp(0.02)).epsilon(1e-15));
  CHECK(discount_factor(p, 0.0) == doctest::Approx(1.0202).epsilon(1e-4));
  CHECK(max_tilt_rate(p) == doctest::Approx(0.05 * std::exp(0.02)));
}

TEST_CASE("parameter validation") {
  const ModelParams good = oracle::reference_params();
  CHECK_NOTHROW(validate(good));
  auto broken = [&](auto mutate) {
    ModelParams p = good;
    mutate(p);
    return p;
  };
  CHECK_THROWS_AS(validate(broken([](ModelParams& p) { p.sigma = 0.0; })), InvalidArgument);
  CHECK_THROWS_AS(validate(broken([](ModelParams& p) { p.alpha = -1.0; })), InvalidArgument);
  CHECK_THROWS_AS(validate(broken([](ModelParams& p) { p.horizon = 0.0; })), InvalidArgument);
  CHECK_THROWS_AS(validate(broken([](ModelParams& p) { p.theta = p.eta; })), InvalidArgument);
  CHECK_THROWS_AS(validate(broken([](ModelParams& p) { p.dependence_threshold = 0.0; })), InvalidArgument);
  CHECK_THROWS_AS(validate(broken([](ModelParams& p) { p.kappa = 0.0; })), InvalidArgument);
  CHECK_NOTHROW(validate(broken([](ModelParams& p) { p.lambda = 0.0; })));

  const ClaimMixture ok({ClaimFamily::exponential(0.1)});
  const ClaimMixture heavy({ClaimFamily::exponential(0.04)});
  CHECK_NOTHROW(validate(good, ok));
  CHECK_THROWS_AS(validate(good, heavy), InvalidArgument);
}

TEST_CASE("default investment cap") {
  const ModelParams p = oracle::reference_params();
  CHECK(default_investment_cap(p) == doctest::Approx(375.0));
  CHECK(with_default_cap(p).investment_cap == doctest::Approx(375.0));
  ModelParams q = p;
  q.mu = q.r;
  CHECK(default_investment_cap(q) > 0.0);
  q.investment_cap = 5.0;
  CHECK(with_default_cap(q).investment_cap == 5.0);
}

TEST_CASE("strategy validation") {
  const ModelParams p = with_default_cap(oracle::reference_params());
  CHECK_NOTHROW(validate(StrategyPoint{10.0, 0.5}, p));
  CHECK_THROWS_AS(validate(StrategyPoint{10.0, 1.2}, p), InvalidArgument);
  CHECK_THROWS_AS(validate(StrategyPoint{1e4, 0.5}, p), InvalidArgument);
}
