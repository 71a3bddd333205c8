#include "catre/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "catre/error.hpp"

namespace catre {

namespace {

void check_sizes(const FilterState& p, const ClaimMixture& mixture) {
  if (p.size() != mixture.size()) {
    std::ostringstream os;
    os << "filter state has " << p.size() << " entries but the mixture has " << mixture.size() << " families";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

FilterState::FilterState(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgument("filter state must have at least one entry");
  double sum = 0.0;
  for (double v : probs_) {
    if (!(v >= 0.0 && v <= 1.0 + 1e-12)) throw InvalidArgument("filter state entries must lie in [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("filter state entries must sum to 1");
  for (double& v : probs_) v = std::min(1.0, v / sum);
}

FilterState FilterState::corner(std::size_t m, std::size_t j) {
  std::vector<double> e(m, 0.0);
  e.at(j) = 1.0;
  return FilterState(std::move(e));
}

FilterState FilterState::uniform(std::size_t m) { return FilterState(std::vector<double>(m, 1.0 / m)); }

int FilterState::corner_index() const noexcept {
  for (std::size_t j = 0; j < probs_.size(); ++j)
    if (probs_[j] == 1.0) return static_cast<int>(j);
  return -1;
}

FilterState jump_update(const FilterState& p, double y, const ClaimMixture& mixture) {
  check_sizes(p, mixture);
  if (!(y > 0.0)) throw InvalidArgument("claim size must be positive");
  const std::size_t m = p.size();
  std::vector<double> next(m);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    next[k] = p[k] > 0.0 ? p[k] * mixture[k].density(y) : 0.0;
    total += next[k];
  }
  if (!(total > 0.0)) {
    std::ostringstream os;
    os << "no family with positive weight has positive density at claim size " << y;
    throw ZeroLikelihood(os.str());
  }
  for (double& v : next) v /= total;
  return FilterState(std::move(next));
}

FilterState batch_posterior(const PriorSpec& prior, std::span<const double> claims, const ClaimMixture& mixture) {
  check_sizes(prior, mixture);
  const std::size_t m = prior.size();
  std::vector<double> logw(m);
  for (std::size_t k = 0; k < m; ++k) logw[k] = prior[k] > 0.0 ? std::log(prior[k]) : -kInf;
  for (double y : claims) {
    if (!(y > 0.0)) throw InvalidArgument("claim size must be positive");
    for (std::size_t k = 0; k < m; ++k) {
      if (logw[k] == -kInf) continue;
      const double f = mixture[k].density(y);
      logw[k] = f > 0.0 ? logw[k] + std::log(f) : -kInf;
    }
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  if (top == -kInf) throw ZeroLikelihood("every family assigns zero likelihood to the claim sequence");
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    w[k] = logw[k] == -kInf ? 0.0 : std::exp(logw[k] - top);
    total += w[k];
  }
  for (double& v : w) v /= total;
  return FilterState(std::move(w));
}

double predictive_density(const FilterState& p, double y, const ClaimMixture& mixture) {
  check_sizes(p, mixture);
  double q = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k)
    if (p[k] > 0.0) q += p[k] * mixture[k].density(y);
  return q;
}

FilterPath::FilterPath(double t0, FilterState initial) : times_{t0}, states_{std::move(initial)} {}

void FilterPath::record_jump(double time, const FilterState& after) {
  if (!(time > times_.back())) throw InvalidArgument("filter jump times must be strictly increasing");
  times_.push_back(time);
  states_.push_back(after);
}

const FilterState& FilterPath::at(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return states_.front();
  return states_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

const FilterState& FilterPath::before(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return states_.front();
  return states_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

}  // namespace catre
