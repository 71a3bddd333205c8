#include "catre/reports.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <boost/math/tools/roots.hpp>
#include <json.hpp>

#include "catre/error.hpp"
#include "catre/simulator.hpp"

namespace catre {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ModelParams with_threshold(ModelParams p, double L) {
  p.dependence_threshold = L;
  return p;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

// ---------------------------------------------------------------- sweep

SweepResult run_threshold_sweep(const RunConfig& config) {
  if (config.mixture.size() != 1)
    throw InvalidArgument("the threshold sweep needs a single claim family (full-information mode)");
  const auto t0 = Clock::now();
  const ClaimFamily& family = config.mixture[0];
  const auto grid = config.sweep.grid();

  SweepResult res;
  res.rows.resize(grid.size());
  std::vector<std::string> errors(grid.size());
  const std::size_t workers = std::max(1, config.solver.grid.threads);
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < grid.size(); i += workers) {
      try {
        res.rows[i] = {grid[i], solve_foc_full(with_threshold(config.params, grid[i]), family, 0.0)};
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!errors[i].empty())
      throw NoConvergence("sweep failed at L = " + fmt(grid[i]) + ": " + errors[i]);

  res.independent_xi = independent_case_investment(config.params, 0.0);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& s = res.rows[i].solution;
    if (s.regime == Regime::Interior) {
      res.max_residual_v1 = std::max(res.max_residual_v1, std::abs(s.residuals[0]));
      res.max_residual_v2 = std::max(res.max_residual_v2, std::abs(s.residuals[1]));
    }
    if (s.xi_star > res.independent_xi + 1e-6) res.below_independent = false;
    if (i > 0 && s.xi_star < res.rows[i - 1].solution.xi_star - 1e-9) res.nondecreasing = false;
  }

  for (std::size_t i = 1; i < res.rows.size() && !res.zero_crossing; ++i) {
    const double xa = res.rows[i - 1].solution.xi_star, xb = res.rows[i].solution.xi_star;
    if (xa == 0.0) {
      res.zero_crossing = res.rows[i - 1].L;
    } else if ((xa < 0.0) != (xb < 0.0)) {
      auto f = [&](double logL) {
        return solve_foc_full(with_threshold(config.params, std::exp(logL)), family, 0.0).xi_star;
      };
      boost::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(f, std::log(res.rows[i - 1].L), std::log(res.rows[i].L), xa,
                                                       xb, boost::math::tools::eps_tolerance<double>(50), iters);
      res.zero_crossing = std::exp(0.5 * (r.first + r.second));
    }
  }
  res.seconds = seconds_since(t0);
  return res;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "L,xi_star,b_star,regime,A_F,B_F,residual_v1,residual_v2\n";
  for (const auto& r : result.rows) {
    const auto& s = r.solution;
    out << fmt(r.L) << ',' << fmt(s.xi_star) << ',' << fmt(s.b_star) << ',' << to_string(s.regime) << ','
        << fmt(s.A_F) << ',' << fmt(s.B_F) << ',' << fmt(s.residuals[0]) << ',' << fmt(s.residuals[1]) << '\n';
  }
}

std::vector<AssertionResult> check_sweep(const RunConfig& config, const SweepResult& result) {
  std::vector<AssertionResult> out;
  const auto& sw = config.sweep;
  auto find_row = [&](double L) -> const SweepRow* {
    for (const auto& r : result.rows)
      if (std::abs(r.L - L) <= 1e-12 * L) return &r;
    return nullptr;
  };
  for (const auto& g : sw.golden) {
    const SweepRow* row = find_row(g.L);
    if (!row) throw InvalidArgument("golden L = " + fmt(g.L) + " is not on the sweep grid");
    if (g.xi) {
      out.push_back({"xi*(L=" + fmt(g.L) + ")", row->solution.xi_star, *g.xi, g.xi_tolerance,
                     std::abs(row->solution.xi_star - *g.xi) <= g.xi_tolerance});
    }
    if (g.b) {
      out.push_back({"b*(L=" + fmt(g.L) + ")", row->solution.b_star, *g.b, g.b_tolerance,
                     std::abs(row->solution.b_star - *g.b) <= g.b_tolerance});
    }
  }
  if (sw.golden_crossing) {
    const double v = result.zero_crossing.value_or(std::nan(""));
    out.push_back({"zero crossing of xi*(L)", v, *sw.golden_crossing, sw.crossing_tolerance,
                   result.zero_crossing && std::abs(v - *sw.golden_crossing) <= sw.crossing_tolerance});
  }
  if (sw.golden_independent) {
    const double tol = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(*sw.golden_independent);
    out.push_back({"independent-case xi", result.independent_xi, *sw.golden_independent, tol,
                   std::abs(result.independent_xi - *sw.golden_independent) <= tol});
  }
  out.push_back({"max interior |v1 - (mu - r)|", result.max_residual_v1, 0.0, sw.residual_tolerance,
                 result.max_residual_v1 < sw.residual_tolerance});
  out.push_back({"max interior |v2 - (1 + theta) kappa|", result.max_residual_v2, 0.0, sw.residual_tolerance,
                 result.max_residual_v2 < sw.residual_tolerance});
  out.push_back({"xi*(L) nondecreasing", result.nondecreasing ? 1.0 : 0.0, 1.0, 0.0, result.nondecreasing});
  out.push_back({"xi*(L) <= independent-case xi + 1e-6", result.below_independent ? 1.0 : 0.0, 1.0, 0.0,
                 result.below_independent});
  return out;
}

// ---------------------------------------------------------------- Bayesian report

BayesReport run_bayes_report(const RunConfig& config) {
  const auto t0 = Clock::now();
  const ModelParams& params = config.params;
  const ClaimMixture& mixture = config.mixture;
  const std::size_t m = mixture.size();
  const auto& sc = config.solver;
  const int nodes = sc.grid.quadrature_nodes;

  BayesReport rep;
  const auto vi = value_iteration(params, mixture, sc.grid);
  const ValueGrid& grid = *vi.grid;
  rep.diagnostics = vi.diagnostics;

  const auto& last = grid.slice(grid.time_count() - 1);
  rep.terminal_slice_exact = std::all_of(last.begin(), last.end(), [](double v) { return v == 1.0; });

  // Corner consistency at every time node.
  for (std::size_t i = 0; i < grid.time_count(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto full = solve_foc_full(params, mixture[j], grid.times()[i]);
      const auto& c = grid.controls(i)[grid.lattice().corner(j)];
      rep.corner_max_deviation = std::max(
          {rep.corner_max_deviation, relative_gap(c.z.xi, full.xi_star), std::abs(c.z.b - full.b_star)});
    }
  }

  const bool ordered = mixture.stochastically_ordered();
  const double tol = sc.bound_tolerance;
  for (int it = 0; it < sc.report_times; ++it) {
    const double t = params.horizon * it / (sc.report_times - 1);
    const auto full_first = solve_foc_full(params, mixture[0], t);
    const auto full_last = solve_foc_full(params, mixture[m - 1], t);
    for (int ip = 0; ip < sc.report_probabilities; ++ip) {
      const double q = static_cast<double>(ip) / (sc.report_probabilities - 1);
      std::vector<double> p(m, 0.0);
      p[0] = q;
      p[m - 1] += 1.0 - q;
      const FilterState fs(p);

      BayesRow row;
      row.t = t;
      row.p = p;
      const auto mm = mean_model_upper_bound(grid, params, mixture, t, fs, nodes);
      const auto& sol = mm.bayes.foc;
      row.z = sol.z;
      row.regime = sol.regime;
      row.residual = std::max(std::abs(sol.residual_v1), sol.regime == Regime::Interior ? std::abs(sol.residual_v2)
                                                                                         : 0.0);
      const double slack = tol * std::max(1.0, std::abs(row.z.xi));

      if (ordered) {
        const auto ab = apriori_bounds(params, mixture, t, row.z.b);
        row.r1_max = ab.r1_max;
        row.r1_min = ab.r1_min;
        row.apriori_ok = row.z.xi >= ab.r1_max - slack && row.z.xi <= ab.r1_min + slack;
        row.xi_family_first = full_first.xi_star;
        row.xi_family_last = full_last.xi_star;
        row.apriori_premise =
            std::abs(row.z.b - full_first.b_star) <= 1e-6 && std::abs(row.z.b - full_last.b_star) <= 1e-6;
        if (row.apriori_premise)
          row.apriori_gated_ok = row.z.xi >= full_last.xi_star - slack && row.z.xi <= full_first.xi_star + slack;
      } else {
        row.r1_max = row.r1_min = row.xi_family_first = row.xi_family_last = std::nan("");
      }

      row.xi_mean_model = mm.mean_model.xi_star;
      row.b_mean_model = mm.mean_model.b_star;
      row.xi_mean_model_at_b = mm.xi_bound_at_bayes_b;
      row.mean_premise = mm.positive_investment && mm.retention_matches;
      if (row.mean_premise)
        row.mean_ok = row.z.xi <= mm.mean_model.xi_star + 2.0 * sc.grid_tolerance * std::max(1.0, std::abs(row.z.xi));

      row.xi_independent = independent_case_investment(params, t);
      row.independent_ok = row.z.xi <= row.xi_independent + 1e-6;

      const int c = fs.corner_index();
      if (c >= 0) {
        row.corner = true;
        const auto& full = c == 0 ? full_first : (static_cast<std::size_t>(c) == m - 1 ? full_last
                                                                                       : solve_foc_full(params, mixture[c], t));
        row.corner_deviation = std::max(relative_gap(row.z.xi, full.xi_star), std::abs(row.z.b - full.b_star));
        row.corner_ok = row.corner_deviation <= 2.0 * sc.grid_tolerance;
      }

      rep.ungated_violations += !row.apriori_ok + !row.independent_ok + !row.corner_ok;
      rep.gated_rows += row.apriori_premise + row.mean_premise;
      rep.gated_violations += !row.apriori_gated_ok + !row.mean_ok;
      rep.rows.push_back(std::move(row));
    }
  }
  if (rep.corner_max_deviation > 2.0 * sc.grid_tolerance) ++rep.ungated_violations;
  if (!rep.terminal_slice_exact) ++rep.ungated_violations;
  if (sc.self_consistency) rep.convergence = scheme_self_consistency(params, mixture, sc.grid);
  rep.seconds = seconds_since(t0);
  return rep;
}

void write_bayes_csv(const BayesReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  const std::size_t m = report.rows.empty() ? 0 : report.rows.front().p.size();
  out << "t";
  for (std::size_t j = 0; j < m; ++j) out << ",p_" << j + 1;
  out << ",xi_star,b_star,regime,residual,r1_max,r1_min,apriori_ok,xi_family_first,xi_family_last,"
         "apriori_premise,apriori_gated_ok,xi_mean_model,b_mean_model,xi_mean_model_at_b,mean_premise,mean_ok,"
         "xi_independent,independent_ok,corner,corner_deviation,corner_ok\n";
  for (const auto& r : report.rows) {
    out << fmt(r.t);
    for (double v : r.p) out << ',' << fmt(v);
    out << ',' << fmt(r.z.xi) << ',' << fmt(r.z.b) << ',' << to_string(r.regime) << ',' << fmt(r.residual) << ','
        << fmt(r.r1_max) << ',' << fmt(r.r1_min) << ',' << r.apriori_ok << ',' << fmt(r.xi_family_first) << ','
        << fmt(r.xi_family_last) << ',' << r.apriori_premise << ',' << r.apriori_gated_ok << ','
        << fmt(r.xi_mean_model) << ',' << fmt(r.b_mean_model) << ',' << fmt(r.xi_mean_model_at_b) << ','
        << r.mean_premise << ',' << r.mean_ok << ',' << fmt(r.xi_independent) << ',' << r.independent_ok << ','
        << r.corner << ',' << fmt(r.corner_deviation) << ',' << r.corner_ok << '\n';
  }
}

// ---------------------------------------------------------------- Monte Carlo validation

double constant_strategy_g(const ModelParams& params, const ClaimFamily& family, StrategyPoint z) {
  validate(params, ClaimMixture({family}));
  const double L = params.dependence_threshold;
  auto rate = [&](double s) {
    const double e = discount_factor(params, s);
    const double ae = params.alpha * e;
    const double below = tilted_moment(family, 0, ae * z.b, 0.0, L);
    const double above = std::isfinite(L) ? tilted_moment(family, 0, ae * z.b, L, kInf) : 0.0;
    return -ae * (params.excess_return() * z.xi + net_income_rate(params, z.b)) +
           0.5 * ae * ae * params.sigma * params.sigma * z.xi * z.xi +
           params.lambda * (below + above * params.jump.mgf(ae * z.xi, 0) - 1.0);
  };
  if (params.r == 0.0) return std::exp(rate(0.0) * params.horizon);
  return std::exp(numeric::integrate(rate, 0.0, params.horizon, 1e-12));
}

bool McReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const McCheck& c) { return c.pass; });
}

namespace {

// Time-dependent full-information optimum, tabulated on a fine grid.
FeedbackStrategy tabulated_full_info(const ModelParams& params, const ClaimFamily& family) {
  if (params.r == 0.0) return constant_strategy(solve_foc_full(params, family, 0.0).strategy());
  const int n = 200;
  std::vector<StrategyPoint> table(n + 1);
  for (int i = 0; i <= n; ++i) table[i] = solve_foc_full(params, family, params.horizon * i / n).strategy();
  const double T = params.horizon;
  return [table, n, T](double t, const FilterState&) {
    const double u = std::clamp(t / T, 0.0, 1.0) * n;
    const int i = std::min(n - 1, static_cast<int>(u));
    const double w = u - i;
    return StrategyPoint{(1 - w) * table[i].xi + w * table[i + 1].xi, (1 - w) * table[i].b + w * table[i + 1].b};
  };
}

FeedbackStrategy transformed(FeedbackStrategy base, double xi_scale, double b_shift) {
  return [base = std::move(base), xi_scale, b_shift](double t, const FilterState& p) {
    auto z = base(t, p);
    return StrategyPoint{z.xi * xi_scale, std::clamp(z.b + b_shift, 0.0, 1.0)};
  };
}

McCheck z_check(std::string name, std::string description, double estimate, double se, double target,
                double threshold) {
  McCheck c;
  c.name = std::move(name);
  c.description = std::move(description);
  c.kind = "z_score";
  c.statistic = se > 0.0 ? (estimate - target) / se : (estimate == target ? 0.0 : kInf);
  c.threshold = threshold;
  c.pass = std::abs(c.statistic) <= threshold;
  c.values = {{"estimate", estimate}, {"std_error", se}, {"target", target}};
  return c;
}

}  // namespace

McReport run_mc_validation(const RunConfig& config) {
  const auto t0 = Clock::now();
  const auto& sim = config.simulation;
  const auto& world = sim.world;
  const ModelParams& wp = world.params;
  const ClaimFamily& family = world.claims[0];
  const ClaimMixture single({family});
  const FilterState point = FilterState::corner(1, 0);
  SimulationOptions opts;
  opts.steps_per_year = sim.steps_per_year;
  opts.threads = sim.threads;
  opts.antithetic = sim.antithetic;

  McReport rep;
  rep.seed = sim.seed;
  rep.n_paths = sim.n_paths;
  const std::size_t n = sim.n_paths;
  std::uint64_t stream = sim.seed;
  auto next_seed = [&] { return stream++; };

  // Deterministic wealth: fully reinsured, and pure drift without claims.
  {
    const std::size_t nd = std::min<std::size_t>(n, 1000);
    auto deterministic = [&](std::string name, std::string what, const ModelParams& p, StrategyPoint z) {
      const double exact = -std::exp(-p.alpha * (p.x0 + net_income_rate(p, z.b) * p.horizon));
      const auto est = estimate_utility(p, single, point, constant_strategy(z), nd, next_seed(), opts);
      McCheck c;
      c.name = std::move(name);
      c.description = std::move(what);
      c.kind = "rel_error";
      c.statistic = std::max(std::abs(est.mean - exact), est.std_error) / std::abs(exact);
      c.threshold = 1e-12;
      c.pass = c.statistic <= c.threshold;
      c.values = {{"estimate", est.mean}, {"std_error", est.std_error}, {"closed_form", exact},
                  {"n_paths", static_cast<double>(nd)}};
      c.estimates = {{"utility", est}};
      rep.checks.push_back(std::move(c));
    };
    deterministic("fully_reinsured", "xi = 0, b = 0: X_T = x0 + (eta - theta) kappa T", wp, {0.0, 0.0});
    ModelParams still = wp;
    still.lambda = 0.0;
    deterministic("pure_drift", "lambda = 0, xi = 0, b = 1: X_T = x0 + c(1) T", still, {0.0, 1.0});
  }

  // Compound-Poisson exponential utility.
  {
    const double exact = -std::exp(-wp.alpha * wp.x0) * constant_strategy_g(wp, family, {0.0, 1.0});
    const auto est = estimate_utility(wp, single, point, constant_strategy({0.0, 1.0}), n, next_seed(), opts);
    auto c = z_check("compound_poisson_mgf", "xi = 0, b = 1: E[U(X_T)] against the compound-Poisson closed form",
                     est.mean, est.std_error, exact, 3.0);
    c.estimates = {{"utility", est}};
    rep.checks.push_back(std::move(c));
  }

  // Mixture identity for a fixed strategy.
  {
    const ClaimMixture& mix = world.mixture;
    const auto strat = constant_strategy(world.mixture_strategy);
    const std::size_t m = mix.size();
    const auto lhs = estimate_g(wp, mix, strat, 0.0, FilterState::uniform(m), n, next_seed(), opts);
    double rhs = 0.0, var = lhs.std_error * lhs.std_error;
    McCheck c;
    for (std::size_t j = 0; j < m; ++j) {
      const auto gj = estimate_g(wp, mix, strat, 0.0, FilterState::corner(m, j), n, next_seed(), opts);
      const double w = 1.0 / static_cast<double>(m);
      rhs += w * gj.mean;
      var += w * w * gj.std_error * gj.std_error;
      c.values.push_back({"g_corner_" + std::to_string(j + 1), gj.mean});
      c.estimates.push_back({"g_corner_" + std::to_string(j + 1), gj});
    }
    auto base = z_check("mixture_identity", "g(0, uniform) = sum_j p_j g(0, e_j) for a fixed strategy", lhs.mean,
                        std::sqrt(var), rhs, 3.0);
    base.values.insert(base.values.end(), c.values.begin(), c.values.end());
    base.estimates = {{"g_uniform", lhs}};
    base.estimates.insert(base.estimates.end(), c.estimates.begin(), c.estimates.end());
    rep.checks.push_back(std::move(base));
  }

  // Dominance of the solved strategy and the dependent-vs-independent comparison.
  {
    const auto opt = tabulated_full_info(wp, family);
    const double dx = world.xi_perturbation, db = world.b_perturbation;
    const auto indep_b = independent_case_strategy(wp, single, 0.0, point);
    FeedbackStrategy indep;
    if (wp.r == 0.0) {
      indep = constant_strategy(indep_b);
    } else {
      indep = [wp, single, point](double t, const FilterState&) {
        return independent_case_strategy(wp, single, t, point);
      };
    }
    const std::vector<std::pair<std::string, FeedbackStrategy>> cands = {
        {"xi_plus", transformed(opt, 1.0 + dx, 0.0)},  {"xi_minus", transformed(opt, 1.0 - dx, 0.0)},
        {"b_plus", transformed(opt, 1.0, db)},         {"b_minus", transformed(opt, 1.0, -db)},
        {"independent_optimum", indep}};
    std::vector<FeedbackStrategy> all{opt};
    for (const auto& c : cands) all.push_back(c.second);
    const std::uint64_t paired_seed = next_seed();
    const auto est = estimate_utility_paired(wp, single, point, all, n, paired_seed, opts);
    const auto z0 = opt(0.0, point);
    for (std::size_t k = 0; k < sim.dump_paths; ++k)
      rep.sample_paths.push_back(simulate_path(wp, single, point, opt, path_seed(paired_seed, k), opts));
    for (std::size_t k = 0; k < cands.size(); ++k) {
      const auto& d = est.differences[k + 1];
      McCheck c;
      const bool strict = cands[k].first == "independent_optimum";
      c.name = (strict ? "comparison_" : "dominance_") + cands[k].first;
      c.description = strict ? "optimal minus independence-optimal utility exceeds 3 std errors (common random numbers)"
                             : "optimal utility >= perturbed utility - 3 std errors (common random numbers)";
      c.kind = "lower_z";
      // z of (optimal - candidate); dominance requires z >= -3, the comparison z >= 3.
      c.statistic = d.std_error > 0.0 ? -d.mean / d.std_error : 0.0;
      c.threshold = strict ? 3.0 : -3.0;
      c.pass = c.statistic >= c.threshold;
      c.values = {{"optimal_mean", est.utilities[0].mean},  {"optimal_std_error", est.utilities[0].std_error},
                  {"candidate_mean", est.utilities[k + 1].mean}, {"candidate_std_error", est.utilities[k + 1].std_error},
                  {"difference_mean", -d.mean},                {"difference_std_error", d.std_error},
                  {"optimal_xi0", z0.xi},                      {"optimal_b0", z0.b}};
      c.estimates = {{"optimal", est.utilities[0]}, {"candidate", est.utilities[k + 1]}, {"difference", d}};
      if (wp.r == 0.0) {
        const auto zc = all[k + 1](0.0, point);
        const double scale = -std::exp(-wp.alpha * wp.x0);
        c.values.push_back({"closed_form_optimal", scale * constant_strategy_g(wp, family, z0)});
        c.values.push_back({"closed_form_candidate", scale * constant_strategy_g(wp, family, zc)});
      }
      rep.checks.push_back(std::move(c));
    }
  }

  // Value iteration against Monte Carlo policy evaluation.
  if (world.value_iteration_check) {
    const GridSpec spec = config.solver.grid;
    const double tol_rel = 2.0 * config.solver.grid_tolerance;
    {
      const auto vi = value_iteration(wp, single, spec);
      const double g_grid = vi.grid->value(0.0, point.probs());
      const auto est = estimate_g(wp, single, tabulated_full_info(wp, family), 0.0, point, n, next_seed(), opts);
      auto c = z_check("value_iteration_m1", "m = 1: grid g(0) against MC of the full-information strategy",
                       est.mean, std::hypot(est.std_error, tol_rel * g_grid / 3.0), g_grid, 3.0);
      c.values.push_back({"grid_tolerance_relative", tol_rel});
      c.estimates = {{"g", est}};
      rep.checks.push_back(std::move(c));
    }
    {
      const auto& mix = world.mixture;
      const auto vi = value_iteration(wp, mix, spec);
      const BayesStrategy bayes(vi.grid, wp, mix, spec.quadrature_nodes);
      const FeedbackStrategy strat = [&bayes](double t, const FilterState& p) { return bayes.tabulated(t, p.probs()); };
      const auto p = FilterState::uniform(mix.size());
      const double g_grid = vi.grid->value(0.0, p.probs());
      const auto est = estimate_g(wp, mix, strat, 0.0, p, n, next_seed(), opts);
      auto c = z_check("value_iteration_bayes", "grid g(0, uniform) against MC of the Bayesian strategy", est.mean,
                       std::hypot(est.std_error, tol_rel * g_grid / 3.0), g_grid, 3.0);
      c.values.push_back({"grid_tolerance_relative", tol_rel});
      c.estimates = {{"g", est}};
      rep.checks.push_back(std::move(c));
    }
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

void write_mc_json(const McReport& report, const std::string& path) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["n_paths"] = report.n_paths;
  j["all_pass"] = report.all_pass();
  auto& arr = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : report.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["description"] = c.description;
    e["kind"] = c.kind;
    e["statistic"] = c.statistic;
    e["threshold"] = c.threshold;
    e["pass"] = c.pass;
    for (const auto& [k, v] : c.values) e[k] = v;
    auto& recs = e["estimates"] = nlohmann::ordered_json::object();
    for (const auto& [k, u] : c.estimates)
      recs[k] = {{"mean", u.mean}, {"std_error", u.std_error}, {"n_paths", u.n_paths}, {"seed", u.seed}};
    arr.push_back(std::move(e));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace catre
