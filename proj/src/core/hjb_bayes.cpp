#include "catre/hjb_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "catre/error.hpp"

namespace catre {

namespace {

// Gauss-Legendre rule on (0, 1).
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = 0.5 * (1.0 - z);
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[n - 1 - i] = 0.5 * wt;
  }
}

// Gauss-Laguerre rule for int_0^inf e^{-x} h(x) dx.
void gauss_laguerre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - x[i - 2]);
    }
    double p1 = 1.0, p2 = 0.0, dp = 0.0;
    for (int it = 0; it < 200; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0 - z) * p2 - (k - 1.0) * p3) / k;
      }
      dp = n * (p1 - p2) / z;
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, z)) break;
    }
    x[i] = z;
    w[i] = -1.0 / (dp * n * p2);
  }
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

// Posterior after a claim at each quadrature node, as lattice stencils.
struct Transition {
  std::vector<double> y;
  std::vector<double> weighted_predictive;  // quadrature weight x sum_k p_k f_k(y)
  std::vector<char> above;
  std::vector<std::vector<StencilEntry>> stencils;
};

Transition make_transition(const ClaimQuadrature& quad, const ClaimMixture& mixture, const SimplexLattice& lattice,
                           std::span<const double> p) {
  Transition tr;
  const std::size_t m = mixture.size();
  std::vector<double> post(m);
  for (const auto& node : quad.nodes()) {
    double q = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      post[k] = p[k] > 0.0 ? p[k] * mixture[k].density(node.y) : 0.0;
      q += post[k];
    }
    if (!(q > 0.0)) continue;
    for (double& v : post) v /= q;
    tr.y.push_back(node.y);
    tr.weighted_predictive.push_back(node.weight * q);
    tr.above.push_back(node.above ? 1 : 0);
    tr.stencils.push_back(lattice.stencil(post));
  }
  return tr;
}

std::vector<double> ratio_masses(const Transition& tr, std::span<const double> slice, double g_here) {
  std::vector<double> mass(tr.y.size());
  for (std::size_t i = 0; i < tr.y.size(); ++i) {
    double gj = 0.0;
    for (const auto& e : tr.stencils[i]) gj += e.weight * slice[e.node];
    mass[i] = tr.weighted_predictive[i] * gj / g_here;
  }
  return mass;
}

double active_residual(const FocSolution& s) {
  double r = std::abs(s.residual_v1);
  if (s.regime == Regime::Interior) r = std::max(r, std::abs(s.residual_v2));
  return r;
}

FocOptions bayes_options() {
  FocOptions opt;
  opt.search_unconstrained = false;
  return opt;
}

}  // namespace

// ---------------------------------------------------------------- ClaimQuadrature

ClaimQuadrature::ClaimQuadrature(const ModelParams& params, const ClaimMixture& mixture, int nodes_per_region) {
  if (nodes_per_region < 2) throw InvalidArgument("claim quadrature needs at least two nodes per region");
  std::vector<double> u, w;
  gauss_legendre_unit(nodes_per_region, u, w);

  double rho_min = kInf, support = 0.0;
  for (const auto& f : mixture.families()) {
    if (f.kind() == ClaimFamily::Kind::Exponential) rho_min = std::min(rho_min, f.rate());
    support = std::max(support, f.support_upper());
  }
  const double L = params.dependence_threshold;

  if (std::isfinite(rho_min)) {
    decay_ = rho_min - max_tilt_rate(params);
    if (!(decay_ > 0.0)) throw InvalidArgument("claim quadrature: tilt reaches the exponential rate");
    const double truncation = std::min(60.0 / decay_, support);
    const double a = std::min(L, truncation);
    const double span_mass = -std::expm1(-decay_ * a);
    for (int i = 0; i < nodes_per_region; ++i) {
      const double v = u[i] * span_mass;
      const double y = -std::log1p(-v) / decay_;
      nodes_.push_back({y, w[i] * span_mass / (decay_ * (1.0 - v)), false});
    }
    if (L < truncation) {
      std::vector<double> lx, lw;
      gauss_laguerre(nodes_per_region, lx, lw);
      for (int i = 0; i < nodes_per_region; ++i) {
        const double t = lx[i] / decay_;
        nodes_.push_back({L + t, lw[i] * std::exp(lx[i]) / decay_, true});
      }
    }
  } else {
    decay_ = 0.0;
    const double a = std::min(L, support);
    for (int i = 0; i < nodes_per_region; ++i) nodes_.push_back({a * u[i], a * w[i], false});
    if (L < support) {
      for (int i = 0; i < nodes_per_region; ++i)
        nodes_.push_back({L + (support - L) * u[i], (support - L) * w[i], true});
    }
  }
}

// ---------------------------------------------------------------- ValueGrid

ValueGrid::ValueGrid(std::vector<double> times, SimplexLattice lattice)
    : times_(std::move(times)), lattice_(std::move(lattice)) {
  if (times_.size() < 2) throw InvalidArgument("value grid needs at least two time nodes");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw InvalidArgument("value grid times must be increasing");
  values_.assign(times_.size(), std::vector<double>(lattice_.node_count(), 1.0));
  controls_.assign(times_.size(), std::vector<Control>(lattice_.node_count()));
}

std::vector<double> ValueGrid::slice_at(double t) const {
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  std::vector<double> out(lattice_.node_count());
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = (1.0 - w) * values_[i - 1][n] + w * values_[i][n];
  return out;
}

double ValueGrid::value(double t, std::span<const double> p) const {
  const auto s = slice_at(t);
  return lattice_.interpolate(s, p);
}

void ValueGrid::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write value grid to '" + path + "'");
  out << "t";
  for (std::size_t j = 0; j < lattice_.dimension(); ++j) out << ",p_" << j + 1;
  out << ",g\n";
  out << std::setprecision(12);
  for (std::size_t i = 0; i < times_.size(); ++i) {
    for (std::size_t n = 0; n < lattice_.node_count(); ++n) {
      out << times_[i];
      for (double v : lattice_.point(n)) out << ',' << v;
      out << ',' << values_[i][n] << '\n';
    }
  }
}

// ---------------------------------------------------------------- RatioMoments

RatioMoments::RatioMoments(const ClaimQuadrature& quadrature, const ClaimMixture& mixture,
                           const SimplexLattice& lattice, std::span<const double> slice, std::span<const double> p,
                           double tilt_limit)
    : tilt_limit_(tilt_limit) {
  const auto tr = make_transition(quadrature, mixture, lattice, p);
  const double g_here = lattice.interpolate(slice, p);
  if (!(g_here > 0.0)) throw InvalidArgument("g must be positive to form the g-ratio");
  y_ = tr.y;
  mass_ = ratio_masses(tr, slice, g_here);
  above_ = tr.above;
}

TiltedMoments RatioMoments::moments(double s) const {
  TiltedMoments m;
  for (std::size_t i = 0; i < y_.size(); ++i) {
    const double y = y_[i];
    const double c = mass_[i] * std::exp(s * y);
    auto& dst = above_[i] ? m.above : m.below;
    dst[0] += c;
    dst[1] += c * y;
    dst[2] += c * y * y;
  }
  return m;
}

// ---------------------------------------------------------------- value iteration

double log_value_bound(const ModelParams& params, const ClaimMixture& mixture) {
  const ModelParams p = with_default_cap(params);
  const double e = std::exp(std::abs(p.r) * p.horizon);
  const double K = p.investment_cap;
  double jump_term = 0.0;
  for (const auto& f : mixture.families())
    jump_term += tilted_moment(f, 0, p.alpha * e, 0.0, kInf) * p.jump.mgf(p.alpha * K * e, 0);
  const double rate = p.alpha * e * (std::abs(p.mu - p.r) * K + (2.0 + p.eta + p.theta) * p.kappa) +
                      0.5 * p.alpha * p.alpha * p.sigma * p.sigma * e * e * K * K + p.lambda * jump_term;
  return rate * p.horizon;
}

namespace {

// Fills controls at slice i and, when i > 0, the slice i - 1 by one explicit step.
void backward_step(ValueGrid& grid, std::size_t i, const ModelParams& p, const std::vector<Transition>& transitions,
                   double tilt_limit, int threads, ValueIterationDiagnostics& diag) {
  const auto& lattice = grid.lattice();
  const auto& g = grid.slice(i);
  const double t = grid.times()[i];
  const double dt = i > 0 ? t - grid.times()[i - 1] : 0.0;
  std::vector<double> next(lattice.node_count(), 0.0);
  std::vector<double> residual(lattice.node_count(), 0.0);
  std::vector<int> fallback(lattice.node_count(), 0);
  auto& controls = grid.controls(i);

  parallel_for(lattice.node_count(), threads, [&](std::size_t n) {
    const auto& tr = transitions[n];
    const auto masses = ratio_masses(tr, g, g[n]);
    struct LocalSource final : MomentSource {
      const Transition& tr;
      const std::vector<double>& mass;
      double limit;
      LocalSource(const Transition& t_, const std::vector<double>& m_, double l_) : tr(t_), mass(m_), limit(l_) {}
      TiltedMoments moments(double s) const override {
        TiltedMoments m;
        for (std::size_t k = 0; k < tr.y.size(); ++k) {
          const double y = tr.y[k];
          const double c = mass[k] * std::exp(s * y);
          auto& dst = tr.above[k] ? m.above : m.below;
          dst[0] += c;
          dst[1] += c * y;
          dst[2] += c * y * y;
        }
        return m;
      }
      double tilt_limit() const override { return limit; }
    } source(tr, masses, tilt_limit);
    const FocSystem sys(p, t, source);
    const auto sol = solve_foc(sys, bayes_options());
    controls[n] = {sol.z, sol.regime};
    residual[n] = active_residual(sol);
    fallback[n] = sol.used_bisection ? 1 : 0;
    if (i > 0) next[n] = g[n] * (1.0 + dt * sys.generator_over_g(sol.z.xi, sol.z.b));
  });

  for (std::size_t n = 0; n < lattice.node_count(); ++n) {
    require_interior_investment(controls[n].z, p);
    diag.max_residual = std::max(diag.max_residual, residual[n]);
    diag.bisection_fallbacks += fallback[n];
  }
  if (i == 0) return;
  for (std::size_t n = 0; n < lattice.node_count(); ++n) {
    if (!(next[n] > 0.0) || !std::isfinite(next[n])) {
      std::ostringstream os;
      os << "explicit step at t = " << grid.times()[i - 1] << " produced g = " << next[n]
         << "; refine the time grid";
      throw StepTooLarge(os.str());
    }
    if (std::log(next[n]) > diag.log_k1_bound) {
      std::ostringstream os;
      os << "g exceeded the a-priori bound at t = " << grid.times()[i - 1] << "; refine the time grid";
      throw StepTooLarge(os.str());
    }
  }
  grid.slice(i - 1) = std::move(next);
}

}  // namespace

ValueIterationResult value_iteration(const ModelParams& params, const ClaimMixture& mixture, const GridSpec& spec) {
  const ModelParams p = with_default_cap(params);
  validate(p, mixture);
  if (spec.time_steps < 1) throw InvalidArgument("value iteration needs at least one time step");

  SimplexLattice lattice(mixture.size(), spec.lattice_divisions);
  const ClaimQuadrature quad(p, mixture, spec.quadrature_nodes);
  std::vector<double> times(static_cast<std::size_t>(spec.time_steps) + 1);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = p.horizon * static_cast<double>(i) / spec.time_steps;
  times.back() = p.horizon;

  std::vector<Transition> transitions;
  transitions.reserve(lattice.node_count());
  for (std::size_t n = 0; n < lattice.node_count(); ++n)
    transitions.push_back(make_transition(quad, mixture, lattice, lattice.point(n)));

  auto grid = std::make_shared<ValueGrid>(times, lattice);
  ValueIterationDiagnostics diag;
  diag.log_k1_bound = log_value_bound(p, mixture);
  const double tilt_limit = mixture.min_tilt_limit();
  for (std::size_t i = times.size() - 1;; --i) {
    backward_step(*grid, i, p, transitions, tilt_limit, spec.threads, diag);
    if (i == 0) break;
  }

  diag.min_g = kInf;
  diag.max_g = 0.0;
  const auto lines = lattice.edge_lines();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& s = grid->slice(i);
    for (double v : s) {
      diag.min_g = std::min(diag.min_g, v);
      diag.max_g = std::max(diag.max_g, v);
    }
    if (i + 1 < times.size()) {
      const auto& s1 = grid->slice(i + 1);
      for (std::size_t n = 0; n < s.size(); ++n)
        diag.time_lipschitz = std::max(diag.time_lipschitz, std::abs(s1[n] - s[n]) / (times[i + 1] - times[i]));
    }
    for (const auto& line : lines)
      for (std::size_t k = 1; k + 1 < line.size(); ++k)
        diag.max_edge_second_difference =
            std::max(diag.max_edge_second_difference, s[line[k - 1]] - 2.0 * s[line[k]] + s[line[k + 1]]);
  }
  return {grid, diag};
}

// ---------------------------------------------------------------- pointwise queries

namespace {

struct PointSetup {
  ModelParams params;
  ClaimQuadrature quad;
  std::vector<double> slice;
};

PointSetup setup_point(const ValueGrid& grid, const ModelParams& params, const ClaimMixture& mixture, double t,
                       const FilterState& p, int nodes) {
  if (p.size() != mixture.size() || p.size() != grid.lattice().dimension())
    throw InvalidArgument("filter state dimension does not match the grid");
  ModelParams mp = with_default_cap(params);
  validate(mp, mixture);
  return {mp, ClaimQuadrature(mp, mixture, nodes), grid.slice_at(t)};
}

}  // namespace

GRatioIntegrals g_ratio_integrals(const ValueGrid& grid, const ModelParams& params, const ClaimMixture& mixture,
                                  double t, const FilterState& p, double xi, double b, int quadrature_nodes) {
  const auto setup = setup_point(grid, params, mixture, t, p, quadrature_nodes);
  const RatioMoments source(setup.quad, mixture, grid.lattice(), setup.slice, p.probs(), mixture.min_tilt_limit());
  const double ae = setup.params.alpha * discount_factor(setup.params, t);
  GRatioIntegrals out;
  out.moments = source.moments(ae * b);
  out.tail = out.moments.above[0];
  out.mean = out.moments.below[1] + out.moments.above[1] * setup.params.jump.mgf(ae * xi, 0);
  return out;
}

BayesSolution solve_foc_bayes(const ValueGrid& grid, const ModelParams& params, const ClaimMixture& mixture, double t,
                              const FilterState& p, int quadrature_nodes) {
  const auto setup = setup_point(grid, params, mixture, t, p, quadrature_nodes);
  const RatioMoments source(setup.quad, mixture, grid.lattice(), setup.slice, p.probs(), mixture.min_tilt_limit());
  const FocSystem sys(setup.params, t, source);
  BayesSolution out{solve_foc(sys, bayes_options())};
  require_interior_investment(out.foc.z, setup.params);
  return out;
}

BayesStrategy::BayesStrategy(std::shared_ptr<const ValueGrid> grid, ModelParams params, ClaimMixture mixture,
                             int quadrature_nodes)
    : grid_(std::move(grid)), params_(std::move(params)), mixture_(std::move(mixture)),
      quadrature_nodes_(quadrature_nodes) {
  if (!grid_) throw InvalidArgument("Bayesian strategy needs a value grid");
}

BayesSolution BayesStrategy::solve(double t, const FilterState& p) const {
  return solve_foc_bayes(*grid_, params_, mixture_, t, p, quadrature_nodes_);
}

StrategyPoint BayesStrategy::tabulated(double t, std::span<const double> p) const {
  const auto& times = grid_->times();
  const auto stencil = grid_->lattice().stencil(p);
  auto at_slice = [&](std::size_t i) {
    StrategyPoint z{0.0, 0.0};
    for (const auto& e : stencil) {
      const auto& c = grid_->controls(i)[e.node];
      z.xi += e.weight * c.z.xi;
      z.b += e.weight * c.z.b;
    }
    return z;
  };
  if (t <= times.front()) return at_slice(0);
  if (t >= times.back()) return at_slice(times.size() - 1);
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
  const auto a = at_slice(i - 1), b = at_slice(i);
  return {(1.0 - w) * a.xi + w * b.xi, std::clamp((1.0 - w) * a.b + w * b.b, 0.0, 1.0)};
}

AprioriBounds apriori_bounds(const ModelParams& params, const ClaimMixture& mixture, double t, double b) {
  mixture.require_stochastic_order();
  const ModelParams p = with_default_cap(params);
  validate(p, mixture);
  const FamilyMoments largest(mixture[mixture.size() - 1], p.dependence_threshold);
  const FamilyMoments smallest(mixture[0], p.dependence_threshold);
  AprioriBounds out;
  out.r1_max = FocSystem(p, t, largest).solve_xi(b);
  out.r1_min = FocSystem(p, t, smallest).solve_xi(b);
  return out;
}

MeanModelBound mean_model_upper_bound(const ValueGrid& grid, const ModelParams& params, const ClaimMixture& mixture,
                                      double t, const FilterState& p, int quadrature_nodes) {
  MeanModelBound out;
  out.bayes = solve_foc_bayes(grid, params, mixture, t, p, quadrature_nodes);
  out.mean_model = solve_foc_full(params, mixture, p.probs(), t);
  const ModelParams mp = with_default_cap(params);
  const FamilyMoments mean_source(mixture, as_vector(p.probs()), mp.dependence_threshold);
  out.xi_bound_at_bayes_b = FocSystem(mp, t, mean_source).solve_xi(out.bayes.foc.z.b);
  out.positive_investment = out.bayes.foc.z.xi > 0.0;
  out.retention_matches = std::abs(out.bayes.foc.z.b - out.mean_model.b_star) <= 1e-6;
  return out;
}

double full_information_g(const ModelParams& params, const ClaimFamily& family, double t, int time_steps,
                          bool explicit_rule) {
  const ModelParams p = with_default_cap(params);
  validate(p, ClaimMixture({family}));
  const FamilyMoments source(family, p.dependence_threshold);
  auto psi = [&](double s) {
    const FocSystem sys(p, s, source);
    FocOptions opt;
    opt.search_unconstrained = false;
    const auto sol = solve_foc(sys, opt);
    return sys.generator_over_g(sol.z.xi, sol.z.b);
  };
  if (explicit_rule) {
    const double dt = p.horizon / time_steps;
    double g = 1.0;
    for (int i = time_steps; i > 0; --i) {
      const double ti = p.horizon * i / time_steps;
      if (ti <= t + 1e-12) break;
      g *= 1.0 + dt * psi(ti);
    }
    return g;
  }
  if (p.r == 0.0) return std::exp(psi(t) * (p.horizon - t));
  return std::exp(numeric::integrate(psi, t, p.horizon, 1e-10));
}

ConvergenceReport scheme_self_consistency(const ModelParams& params, const ClaimMixture& mixture,
                                          const GridSpec& coarse) {
  ConvergenceReport rep;
  std::vector<std::vector<double>> levels;
  SimplexLattice base(mixture.size(), coarse.lattice_divisions);
  for (int level = 0; level < 3; ++level) {
    GridSpec spec = coarse;
    spec.time_steps = coarse.time_steps << level;
    spec.lattice_divisions = coarse.lattice_divisions << level;
    const auto res = value_iteration(params, mixture, spec);
    std::vector<double> at_base(base.node_count());
    for (std::size_t n = 0; n < base.node_count(); ++n) at_base[n] = res.grid->value(0.0, base.point(n));
    levels.push_back(std::move(at_base));
  }
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    double d = 0.0;
    for (std::size_t n = 0; n < levels[l].size(); ++n) d = std::max(d, std::abs(levels[l][n] - levels[l + 1][n]));
    rep.differences.push_back(d);
  }
  rep.empirical_order = (rep.differences[1] > 0.0) ? std::log2(rep.differences[0] / rep.differences[1]) : kInf;
  return rep;
}

}  // namespace catre
