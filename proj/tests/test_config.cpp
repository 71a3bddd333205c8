#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "catre/config.hpp"
#include "catre/error.hpp"

using namespace catre;

namespace {

std::string config_dir() {
  const char* d = std::getenv("CATRE_CONFIG_DIR");
  return d ? d : "configs";
}

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -2;
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config("{}");
  CHECK(c.mixture.size() == 1);
  CHECK(c.params.mu == 0.3);
  CHECK(c.params.full_reinsurance_price() == doctest::Approx(350.0));
  CHECK(c.prior.size() == 1);
  CHECK(c.sweep.grid().size() == 200);
  CHECK(c.output_directory == "out");
}

TEST_CASE("shipped configurations load") {
  const auto d = load_config(config_dir() + "/default.yaml");
  CHECK(d.params.dependence_threshold == 100.0);
  CHECK(d.mixture[0].rate() == doctest::Approx(0.1));
  CHECK(d.sweep.golden.size() == 3);
  REQUIRE(d.sweep.golden_crossing.has_value());
  CHECK(*d.sweep.golden_crossing == doctest::Approx(64.35));
  const auto grid = d.sweep.grid();
  CHECK(std::find(grid.begin(), grid.end(), 100.0) != grid.end());
  CHECK(grid.front() == doctest::Approx(1e-3));
  CHECK(grid.back() == doctest::Approx(1e6));

  const auto b = load_config(config_dir() + "/bayes_two_exponentials.yaml");
  CHECK(b.mixture.size() == 2);
  CHECK(b.mixture.stochastically_ordered());
  CHECK(b.prior[0] == doctest::Approx(0.5));
  CHECK(b.solver.grid.time_steps == 200);
  CHECK(b.output_directory == "out_bayes");
}

TEST_CASE("model and claim blocks") {
  const auto c = parse_config(R"(
model: {lambda: 4, threshold: 25, kappa: 50}
claims:
  - {kind: exponential, mean: 5}
  - {kind: exponential, rate: 0.1}
prior: [0.25, 0.75]
)");
  CHECK(c.params.lambda == 4.0);
  CHECK(c.params.dependence_threshold == 25.0);
  CHECK(c.mixture[0].rate() == doctest::Approx(0.2));
  CHECK(c.prior[1] == doctest::Approx(0.75));
  CHECK(c.sweep.golden.empty());
}

TEST_CASE("tabulated families inline and from a file") {
  const auto dir = std::filesystem::temp_directory_path() / "catre_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "claims.csv");
    out << "y,f\n0,0\n1,1\n2,0\n";
  }
  {
    std::ofstream out(dir / "run.yaml");
    out << "claims:\n  - {kind: tabulated, file: claims.csv}\n  - {kind: tabulated, y: [0, 2, 4], f: [0, 1, 0], "
           "normalize: true}\njump: {kind: tabulated, z: [0, 1], f: [1, 1]}\n";
  }
  const auto c = load_config((dir / "run.yaml").string());
  CHECK(c.mixture[0].kind() == ClaimFamily::Kind::Tabulated);
  CHECK(c.mixture[0].mean() == doctest::Approx(1.0));
  CHECK(c.mixture[1].mean() == doctest::Approx(2.0));
  CHECK(c.params.jump.mean() == doctest::Approx(0.5));
  std::filesystem::remove_all(dir);
}

TEST_CASE("errors carry the offending line") {
  CHECK(error_line("model:\n  mu: 0.3\n  sigmaa: 0.4\n") == 3);
  CHECK(error_line("claims:\n  - {kind: weibull, rate: 1}\n") == 2);
  CHECK(error_line("claims:\n  - {kind: exponential, rate: 1, mean: 1}\n") == 2);
  CHECK(error_line("model:\n  sigma: -1\n") >= 1);
  CHECK(error_line("claims:\n  - {rate: 0.1}\nprior: [0.5, 0.5]\n") == 3);
  CHECK(error_line("sweep:\n  points: 1\n") == 2);
  CHECK(error_line("model:\n  mu: abc\n") == 2);
  CHECK(error_line("colour: red\n") == 1);
  CHECK_THROWS_AS(parse_config("model: [1, 2"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.yaml"), Error);
}

TEST_CASE("simulation block and validation world") {
  const auto c = parse_config(R"(
simulation:
  n_paths: 5000
  seed: 42
  antithetic: true
  world:
    model: {lambda: 5}
    claims: [{rate: 1.0}]
    mixture: [{rate: 1.0}, {rate: 0.5}]
    mixture_strategy: {xi: 3, b: 0.2}
)");
  CHECK(c.simulation.n_paths == 5000);
  CHECK(c.simulation.seed == 42);
  CHECK(c.simulation.antithetic);
  CHECK(c.simulation.world.params.lambda == 5.0);
  CHECK(c.simulation.world.claims[0].rate() == 1.0);
  CHECK(c.simulation.world.mixture.size() == 2);
  CHECK(c.simulation.world.mixture_strategy.b == 0.2);
  CHECK(error_line("simulation:\n  world:\n    claims: [{rate: 1}, {rate: 2}]\n") == 3);
}
