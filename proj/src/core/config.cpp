#include "catre/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "catre/error.hpp"

namespace catre {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : -1; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& what) { throw ConfigError(what, line_of(n)); }

void require_map(const YAML::Node& n, const std::string& name) {
  if (!n.IsMap()) fail(n, "'" + name + "' must be a mapping");
}

void check_keys(const YAML::Node& n, const std::string& block, const std::set<std::string>& allowed) {
  require_map(n, block);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in '" + block + "'");
  }
}

template <typename T>
T scalar(const YAML::Node& n, const std::string& name) {
  if (!n.IsScalar()) fail(n, "'" + name + "' must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, "'" + name + "' has an invalid value '" + n.Scalar() + "'");
  }
}

double number(const YAML::Node& n, const std::string& name) {
  const auto& s = n.IsScalar() ? n.Scalar() : std::string();
  if (s == "inf" || s == ".inf" || s == "infinity") return kInf;
  const double v = scalar<double>(n, name);
  if (std::isnan(v)) fail(n, "'" + name + "' must not be NaN");
  return v;
}

template <typename T>
void read(const YAML::Node& block, const char* key, T& out) {
  if (const auto n = block[key]) {
    if constexpr (std::is_same_v<T, double>) {
      out = number(n, key);
    } else {
      out = scalar<T>(n, key);
    }
  }
}

std::vector<double> numbers(const YAML::Node& n, const std::string& name) {
  if (!n.IsSequence()) fail(n, "'" + name + "' must be a sequence of numbers");
  std::vector<double> out;
  for (const auto& v : n) out.push_back(number(v, name));
  return out;
}

std::string resolve(const std::string& file, const std::string& origin) {
  namespace fs = std::filesystem;
  fs::path p(file);
  if (p.is_relative() && origin != "<string>") p = fs::path(origin).parent_path() / p;
  return p.string();
}

void read_model(const YAML::Node& n, ModelParams& p) {
  check_keys(n, "model",
             {"r", "mu", "sigma", "lambda", "threshold", "alpha", "horizon", "kappa", "eta", "theta", "x0",
              "investment_cap"});
  read(n, "r", p.r);
  read(n, "mu", p.mu);
  read(n, "sigma", p.sigma);
  read(n, "lambda", p.lambda);
  read(n, "threshold", p.dependence_threshold);
  read(n, "alpha", p.alpha);
  read(n, "horizon", p.horizon);
  read(n, "kappa", p.kappa);
  read(n, "eta", p.eta);
  read(n, "theta", p.theta);
  read(n, "x0", p.x0);
  read(n, "investment_cap", p.investment_cap);
}

JumpLaw read_jump(const YAML::Node& n, const std::string& origin) {
  check_keys(n, "jump", {"kind", "z", "f", "file", "normalize"});
  const auto kind = n["kind"] ? scalar<std::string>(n["kind"], "kind") : std::string("uniform");
  try {
    if (kind == "uniform") return JumpLaw::uniform();
    if (kind == "tabulated") {
      bool normalize = false;
      read(n, "normalize", normalize);
      std::vector<double> z, f;
      if (n["file"]) {
        const auto path = resolve(scalar<std::string>(n["file"], "file"), origin);
        const auto fam = ClaimFamily::tabulated_from_csv(path, normalize);
        z.assign(fam.grid().begin(), fam.grid().end());
        f.assign(fam.grid_density().begin(), fam.grid_density().end());
      } else {
        if (!n["z"] || !n["f"]) fail(n, "tabulated jump law needs 'z' and 'f' (or 'file')");
        z = numbers(n["z"], "z");
        f = numbers(n["f"], "f");
      }
      return JumpLaw::tabulated(std::move(z), std::move(f), normalize);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(n, e.what());
  }
  fail(n["kind"], "unknown jump kind '" + kind + "' (expected uniform or tabulated)");
}

ClaimFamily read_family(const YAML::Node& n, const std::string& origin) {
  check_keys(n, "claims[]", {"kind", "rate", "mean", "y", "f", "file", "normalize"});
  const auto kind = n["kind"] ? scalar<std::string>(n["kind"], "kind") : std::string("exponential");
  try {
    if (kind == "exponential") {
      if (n["rate"] && n["mean"]) fail(n, "give either 'rate' or 'mean', not both");
      if (n["rate"]) return ClaimFamily::exponential(number(n["rate"], "rate"));
      if (n["mean"]) return ClaimFamily::exponential(1.0 / number(n["mean"], "mean"));
      fail(n, "exponential family needs 'rate' or 'mean'");
    }
    if (kind == "tabulated") {
      bool normalize = false;
      read(n, "normalize", normalize);
      if (n["file"]) return ClaimFamily::tabulated_from_csv(resolve(scalar<std::string>(n["file"], "file"), origin),
                                                            normalize);
      if (!n["y"] || !n["f"]) fail(n, "tabulated family needs 'y' and 'f' (or 'file')");
      return ClaimFamily::tabulated(numbers(n["y"], "y"), numbers(n["f"], "f"), normalize);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(n, e.what());
  }
  fail(n["kind"], "unknown claim family kind '" + kind + "' (expected exponential or tabulated)");
}

ClaimMixture read_mixture(const YAML::Node& n, const std::string& origin, const std::string& name) {
  if (!n.IsSequence() || n.size() == 0) fail(n, "'" + name + "' must be a nonempty sequence of families");
  std::vector<ClaimFamily> fams;
  for (const auto& f : n) fams.push_back(read_family(f, origin));
  try {
    return ClaimMixture(std::move(fams));
  } catch (const Error& e) {
    fail(n, e.what());
  }
}

StrategyPoint read_strategy(const YAML::Node& n, const std::string& name) {
  check_keys(n, name, {"xi", "b"});
  StrategyPoint z;
  read(n, "xi", z.xi);
  read(n, "b", z.b);
  if (!(z.b >= 0.0 && z.b <= 1.0)) fail(n, "'" + name + ".b' must lie in [0, 1]");
  return z;
}

void read_sweep(const YAML::Node& n, SweepConfig& s) {
  check_keys(n, "sweep",
             {"log10_min", "log10_max", "points", "include", "golden", "crossing", "crossing_tolerance",
              "independent", "residual_tolerance"});
  read(n, "log10_min", s.log10_min);
  read(n, "log10_max", s.log10_max);
  read(n, "points", s.points);
  if (s.points < 2) fail(n["points"] ? n["points"] : n, "'sweep.points' must be at least 2");
  if (!(s.log10_max > s.log10_min)) fail(n, "'sweep.log10_max' must exceed 'sweep.log10_min'");
  if (n["include"]) s.extra = numbers(n["include"], "include");
  for (std::size_t i = 0; i < s.extra.size(); ++i)
    if (!(s.extra[i] > 0.0) || !std::isfinite(s.extra[i])) fail(n["include"][i], "sweep L values must be positive");
  if (const auto g = n["golden"]) {
    if (!g.IsSequence()) fail(g, "'sweep.golden' must be a sequence");
    for (const auto& e : g) {
      check_keys(e, "sweep.golden[]", {"L", "xi", "xi_tolerance", "b", "b_tolerance"});
      GoldenPoint gp;
      if (!e["L"]) fail(e, "golden point needs 'L'");
      gp.L = number(e["L"], "L");
      if (e["xi"]) gp.xi = number(e["xi"], "xi");
      if (e["b"]) gp.b = number(e["b"], "b");
      read(e, "xi_tolerance", gp.xi_tolerance);
      read(e, "b_tolerance", gp.b_tolerance);
      s.golden.push_back(gp);
    }
  }
  if (n["crossing"]) s.golden_crossing = number(n["crossing"], "crossing");
  read(n, "crossing_tolerance", s.crossing_tolerance);
  if (n["independent"]) s.golden_independent = number(n["independent"], "independent");
  read(n, "residual_tolerance", s.residual_tolerance);
}

void read_solver(const YAML::Node& n, SolverConfig& s) {
  check_keys(n, "solver",
             {"time_steps", "lattice_divisions", "quadrature_nodes", "threads", "grid_tolerance", "bound_tolerance",
              "report_times", "report_probabilities", "self_consistency"});
  read(n, "time_steps", s.grid.time_steps);
  read(n, "lattice_divisions", s.grid.lattice_divisions);
  read(n, "quadrature_nodes", s.grid.quadrature_nodes);
  read(n, "threads", s.grid.threads);
  read(n, "grid_tolerance", s.grid_tolerance);
  read(n, "bound_tolerance", s.bound_tolerance);
  read(n, "report_times", s.report_times);
  read(n, "report_probabilities", s.report_probabilities);
  read(n, "self_consistency", s.self_consistency);
  if (s.grid.time_steps < 1) fail(n["time_steps"], "'solver.time_steps' must be at least 1");
  if (s.grid.lattice_divisions < 1) fail(n["lattice_divisions"], "'solver.lattice_divisions' must be at least 1");
  if (s.grid.quadrature_nodes < 2) fail(n["quadrature_nodes"], "'solver.quadrature_nodes' must be at least 2");
  if (s.report_times < 2 || s.report_probabilities < 2) fail(n, "report grids need at least two points");
}

void read_simulation(const YAML::Node& n, SimulationConfig& s, const ModelParams& base, const std::string& origin) {
  check_keys(n, "simulation", {"n_paths", "seed", "steps_per_year", "threads", "antithetic", "dump_paths", "world"});
  read(n, "n_paths", s.n_paths);
  read(n, "seed", s.seed);
  read(n, "steps_per_year", s.steps_per_year);
  read(n, "threads", s.threads);
  read(n, "antithetic", s.antithetic);
  read(n, "dump_paths", s.dump_paths);
  if (s.n_paths < 2) fail(n["n_paths"], "'simulation.n_paths' must be at least 2");
  if (s.antithetic && s.n_paths % 2) fail(n["n_paths"], "antithetic sampling needs an even 'n_paths'");
  if (s.steps_per_year < 1) fail(n["steps_per_year"], "'simulation.steps_per_year' must be at least 1");
  if (const auto w = n["world"]) {
    check_keys(w, "simulation.world",
               {"model", "claims", "mixture", "mixture_strategy", "xi_perturbation", "b_perturbation",
                "value_iteration_check"});
    ValidationWorld& world = s.world;
    if (w["model"]) {
      world.params = base;
      read_model(w["model"], world.params);
    }
    if (w["claims"]) world.claims = read_mixture(w["claims"], origin, "simulation.world.claims");
    if (world.claims.size() != 1) fail(w["claims"], "'simulation.world.claims' must hold exactly one family");
    if (w["mixture"]) world.mixture = read_mixture(w["mixture"], origin, "simulation.world.mixture");
    if (w["mixture_strategy"]) world.mixture_strategy = read_strategy(w["mixture_strategy"], "mixture_strategy");
    read(w, "xi_perturbation", world.xi_perturbation);
    read(w, "b_perturbation", world.b_perturbation);
    read(w, "value_iteration_check", world.value_iteration_check);
    try {
      validate(world.params, world.claims);
      validate(world.params, world.mixture);
    } catch (const Error& e) {
      fail(w, e.what());
    }
  }
}

}  // namespace

std::vector<double> SweepConfig::grid() const {
  std::vector<double> out;
  for (int i = 0; i < points; ++i)
    out.push_back(std::pow(10.0, log10_min + (log10_max - log10_min) * i / (points - 1)));
  out.insert(out.end(), extra.begin(), extra.end());
  for (const auto& g : golden) out.push_back(g.L);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
            out.end());
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": " + e.msg, e.mark.line >= 0 ? e.mark.line + 1 : -1);
  }
  RunConfig cfg;
  cfg.origin = origin;
  if (root.IsNull()) return cfg;
  check_keys(root, "<root>", {"model", "jump", "claims", "prior", "sweep", "solver", "simulation", "output"});

  if (root["model"]) read_model(root["model"], cfg.params);
  if (root["jump"]) cfg.params.jump = read_jump(root["jump"], origin);
  if (root["claims"]) cfg.mixture = read_mixture(root["claims"], origin, "claims");
  try {
    validate(cfg.params, cfg.mixture);
  } catch (const Error& e) {
    fail(root["model"] ? root["model"] : root, e.what());
  }

  if (const auto pr = root["prior"]) {
    auto probs = numbers(pr, "prior");
    if (probs.size() != cfg.mixture.size())
      fail(pr, "'prior' has " + std::to_string(probs.size()) + " entries but there are " +
                   std::to_string(cfg.mixture.size()) + " claim families");
    try {
      cfg.prior = FilterState(std::move(probs));
    } catch (const Error& e) {
      fail(pr, e.what());
    }
  } else {
    cfg.prior = FilterState::uniform(cfg.mixture.size());
  }

  if (root["sweep"]) read_sweep(root["sweep"], cfg.sweep);
  if (root["solver"]) read_solver(root["solver"], cfg.solver);
  if (root["simulation"]) {
    // World overrides apply on top of the light-tailed defaults.
    ModelParams base = cfg.simulation.world.params;
    base.jump = cfg.params.jump;
    cfg.simulation.world.params.jump = cfg.params.jump;
    read_simulation(root["simulation"], cfg.simulation, base, origin);
  } else {
    cfg.simulation.world.params.jump = cfg.params.jump;
  }
  if (const auto out = root["output"]) {
    check_keys(out, "output", {"directory"});
    read(out, "directory", cfg.output_directory);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace catre
