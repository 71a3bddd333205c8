// Command-line front end. Talks to the library only through catre.h.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catre/catre.h"

namespace {

enum class Command { Sweep, Bayes, Validate };

int fail(catre_status s) {
  std::fprintf(stderr, "error: %s: %s\n", catre_status_string(s), catre_last_error());
  return 2;
}

int run(Command cmd, const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed,
        bool assert_golden) {
  catre_config* cfg = nullptr;
  catre_status s = catre_config_load(config_path.c_str(), &cfg);
  if (s != CATRE_OK) return fail(s);
  if (seed) catre_config_set_seed(cfg, *seed);

  catre_run_result res{0, nullptr};
  const char* dir = out_dir.empty() ? nullptr : out_dir.c_str();
  switch (cmd) {
    case Command::Sweep:
      s = catre_run_sweep(cfg, dir, assert_golden ? 1 : 0, &res);
      break;
    case Command::Bayes:
      s = catre_run_bayes(cfg, dir, &res);
      break;
    case Command::Validate:
      s = catre_run_validate(cfg, dir, &res);
      break;
  }
  catre_config_free(cfg);
  if (s != CATRE_OK) return fail(s);

  std::fputs(res.summary, stdout);
  catre_string_free(res.summary);
  if (res.violations > 0) {
    std::fprintf(stderr, "%d assertion(s) failed\n", res.violations);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal investment and catastrophe reinsurance under claim-size uncertainty"};
  app.set_version_flag("--version", std::string(catre_version()));
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool assert_golden = false;

  std::vector<CLI::Option*> seed_opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "YAML configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: output.directory of the config)");
    seed_opts.push_back(sub->add_option("--seed", seed, "override simulation.seed"));
  };

  auto* sweep = app.add_subcommand("sweep", "full-information solution over the dependence threshold L");
  add_common(sweep);
  sweep->add_flag("--assert-golden", assert_golden, "fail unless the golden points and crossing reproduce");

  auto* bayes = app.add_subcommand("bayes", "value iteration and bound checks for the learning problem");
  add_common(bayes);

  auto* validate = app.add_subcommand("validate", "Monte Carlo validation of the value function and strategies");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  std::optional<std::uint64_t> s;
  for (const auto* o : seed_opts)
    if (o->count() > 0) s = seed;
  if (*sweep) return run(Command::Sweep, config_path, out_dir, s, assert_golden);
  if (*bayes) return run(Command::Bayes, config_path, out_dir, s, false);
  return run(Command::Validate, config_path, out_dir, s, false);
}
