#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "catre/filter.hpp"
#include "catre/market.hpp"
#include "catre/simulator.hpp"
#include "oracle.hpp"

using namespace catre;

namespace {

// Light-tailed setting where Monte Carlo errors are well behaved.
ModelParams light() {
  ModelParams p = oracle::reference_params(11.0);
  p.lambda = 20.0;
  p.kappa = 13.0;
  return p;
}

const ClaimMixture& light_claims() {
  static const ClaimMixture m({ClaimFamily::exponential(0.5)});
  return m;
}

const ClaimMixture& light_pair() {
  static const ClaimMixture m({ClaimFamily::exponential(0.5), ClaimFamily::exponential(0.25)});
  return m;
}

}  // namespace

TEST_CASE("path structure") {
  const ModelParams p = light();
  const FilterState prior({0.5, 0.5});
  const auto strat = [](double t, const FilterState& q) { return StrategyPoint{10.0 + 5.0 * t, 0.3 + 0.5 * q[0]}; };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto path = simulate_path(p, light_pair(), prior, strat, seed);
    CHECK(path.times.front() == 0.0);
    CHECK(path.times.back() == doctest::Approx(p.horizon).epsilon(1e-15));
    CHECK(path.wealth.front() == p.x0);
    for (std::size_t n = 0; n < path.jump_times.size(); ++n) {
      CHECK(path.jump_times[n] > 0.0);
      CHECK(path.jump_times[n] <= p.horizon);
      if (n > 0) CHECK(path.jump_times[n] > path.jump_times[n - 1]);
      const auto z = path.jump_controls[n];
      const double jump = -(z.b * path.claims[n] + (path.claims[n] > p.dependence_threshold ? z.xi * path.drops[n] : 0.0));
      CHECK(path.wealth_after_jump[n] - path.wealth_before_jump[n] == doctest::Approx(jump).epsilon(1e-12).scale(1.0));
      CHECK(path.drops[n] > 0.0);
      CHECK(path.drops[n] < 1.0);
    }
    // The filter recorded on the grid is the fold of the jump update over the claims seen so far.
    FilterState expect = prior;
    std::size_t seen = 0;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
      while (seen < path.jump_times.size() && path.jump_times[seen] <= path.times[k]) {
        expect = jump_update(expect, path.claims[seen], light_pair());
        ++seen;
      }
      CHECK(path.filter[k][0] == doctest::Approx(expect[0]).epsilon(1e-12));
    }
  }
}

TEST_CASE("same seed, same path") {
  const auto s = constant_strategy({15.0, 0.6});
  const auto a = simulate_path(light(), light_claims(), FilterState({1.0}), s, 99);
  const auto b = simulate_path(light(), light_claims(), FilterState({1.0}), s, 99);
  const auto c = simulate_path(light(), light_claims(), FilterState({1.0}), s, 100);
  CHECK(a.terminal_wealth() == b.terminal_wealth());
  CHECK(a.claims == b.claims);
  CHECK(a.terminal_wealth() != c.terminal_wealth());
}

TEST_CASE("a path inside an estimate can be replayed") {
  const auto s = constant_strategy({15.0, 0.6});
  const ModelParams p = light();
  const auto est = estimate_utility(p, light_claims(), FilterState({1.0}), s, 2, 41);
  double mean = 0.0;
  for (std::uint64_t k = 0; k < 2; ++k) {
    const auto path = simulate_path(p, light_claims(), FilterState({1.0}), s, path_seed(41, k));
    mean += -0.5 * std::exp(-p.alpha * path.terminal_wealth());
  }
  CHECK(est.mean == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("estimates do not depend on the thread count") {
  SimulationOptions one, three;
  three.threads = 3;
  const auto s = constant_strategy({15.0, 0.6});
  const auto a = estimate_utility(light(), light_claims(), FilterState({1.0}), s, 5000, 7, one);
  const auto b = estimate_utility(light(), light_claims(), FilterState({1.0}), s, 5000, 7, three);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.n_paths == 5000);
  CHECK(a.seed == 7);
}

TEST_CASE("deterministic wealth") {
  ModelParams p = light();
  const double full = -std::exp(-p.alpha * (p.x0 + net_income_rate(p, 0.0) * p.horizon));
  const auto a = estimate_utility(p, light_claims(), FilterState({1.0}), constant_strategy({0.0, 0.0}), 500, 3);
  CHECK(a.mean == doctest::Approx(full).epsilon(1e-12));
  CHECK(a.std_error < 1e-14);

  p.lambda = 0.0;
  const double drift = -std::exp(-p.alpha * (p.x0 + net_income_rate(p, 1.0) * p.horizon));
  const auto b = estimate_utility(p, light_claims(), FilterState({1.0}), constant_strategy({0.0, 1.0}), 500, 3);
  CHECK(b.mean == doctest::Approx(drift).epsilon(1e-12));
  CHECK(b.std_error == 0.0);
}

TEST_CASE("compound Poisson closed form") {
  const ModelParams p = light();
  const double rho = 0.5;
  const double exact = -std::exp(-p.alpha * (p.x0 + net_income_rate(p, 1.0) * p.horizon)) *
                       std::exp(p.lambda * p.horizon * (rho / (rho - p.alpha) - 1.0));
  const auto est = estimate_utility(p, light_claims(), FilterState({1.0}), constant_strategy({0.0, 1.0}), 20000, 11);
  CHECK(std::abs(est.mean - exact) < 3.0 * est.std_error);
}

TEST_CASE("pure diffusion closed form, plain and antithetic") {
  ModelParams p = light();
  p.lambda = 0.0;
  const double xi = 30.0;
  const double exact = -std::exp(-p.alpha * (p.x0 + (net_income_rate(p, 1.0) + p.mu * xi) * p.horizon) +
                                 0.5 * p.alpha * p.alpha * p.sigma * p.sigma * xi * xi * p.horizon);
  SimulationOptions anti;
  anti.antithetic = true;
  for (const auto& opts : {SimulationOptions{}, anti}) {
    const auto est = estimate_utility(p, light_claims(), FilterState({1.0}), constant_strategy({xi, 1.0}), 10000, 5, opts);
    CHECK(std::abs(est.mean - exact) < 3.0 * est.std_error);
    CHECK(est.std_error > 0.0);
  }
}

TEST_CASE("g estimate") {
  const ModelParams p = light();
  const auto s = constant_strategy({20.0, 0.5});
  const auto end = estimate_g(p, light_pair(), s, p.horizon, FilterState({0.5, 0.5}), 100, 1);
  CHECK(end.mean == 1.0);
  CHECK(end.std_error == 0.0);
  // Corner estimate against the closed form for a constant strategy.
  ModelParams q = p;
  const double e = 1.0;
  const double s0 = q.alpha * e * 0.5;
  const double L = q.dependence_threshold, rho = 0.5;
  const double below = rho / (rho - s0) * -std::expm1(-(rho - s0) * L);
  const double above = rho / (rho - s0) * std::exp(-(rho - s0) * L);
  const double psi = -q.alpha * (q.mu * 20.0 + net_income_rate(q, 0.5)) +
                     0.5 * q.alpha * q.alpha * q.sigma * q.sigma * 400.0 +
                     q.lambda * (below + above * oracle::uniform_mgf(q.alpha * 20.0) - 1.0);
  const double exact = std::exp(psi * (q.horizon - 0.4));
  const auto est = estimate_g(q, light_pair(), s, 0.4, FilterState::corner(2, 0), 20000, 2);
  CHECK(std::abs(est.mean - exact) < 3.0 * est.std_error);
}

TEST_CASE("common random numbers") {
  const ModelParams p = light();
  const std::vector<FeedbackStrategy> same{constant_strategy({20.0, 0.5}), constant_strategy({20.0, 0.5}),
                                           constant_strategy({24.0, 0.5})};
  const auto r = estimate_utility_paired(p, light_claims(), FilterState({1.0}), same, 2000, 4);
  REQUIRE(r.utilities.size() == 3);
  REQUIRE(r.differences.size() == 3);
  CHECK(r.differences[1].mean == 0.0);
  CHECK(r.differences[1].std_error == 0.0);
  CHECK(r.differences[2].mean == doctest::Approx(r.utilities[2].mean - r.utilities[0].mean).epsilon(1e-12));
  CHECK(r.differences[2].std_error < r.utilities[2].std_error);
  const auto solo = estimate_utility(p, light_claims(), FilterState({1.0}), same[0], 2000, 4);
  CHECK(solo.mean == r.utilities[0].mean);
}

TEST_CASE("running statistics merge") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(2.0, 3.0);
  std::vector<double> xs(1001);
  for (auto& x : xs) x = N(rng);
  RunningStats all, a, b;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 400 ? a : b).add(xs[i]);
  }
  a.merge(b);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  CHECK(a.n == xs.size());
  CHECK(a.mean == doctest::Approx(mean).epsilon(1e-13));
  CHECK(a.variance() == doctest::Approx(ss / (xs.size() - 1)).epsilon(1e-12));
  CHECK(all.variance() == doctest::Approx(a.variance()).epsilon(1e-12));
}

TEST_CASE("path csv") {
  const auto path = simulate_path(light(), light_pair(), FilterState({0.5, 0.5}), constant_strategy({1.0, 0.5}), 8);
  const auto file = std::filesystem::temp_directory_path() / "catre_path_test.csv";
  write_path_csv(path, file.string());
  std::ifstream in(file);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,X,p_1,p_2,xi,b");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == path.times.size());
  std::filesystem::remove(file);
}
