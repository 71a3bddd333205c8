#pragma once

// Posterior over the unknown claim-size family.

#include <span>
#include <vector>

#include "catre/distributions.hpp"

namespace catre {

/// A point on the probability simplex over the family index.
class FilterState {
 public:
  /// Entries must be in [0, 1] and sum to 1 within 1e-9; the stored vector is renormalized.
  explicit FilterState(std::vector<double> probs);

  static FilterState corner(std::size_t m, std::size_t j);
  static FilterState uniform(std::size_t m);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t j) const { return probs_[j]; }
  std::span<const double> probs() const noexcept { return probs_; }

  /// Index j when the state is the unit vector e_j, otherwise -1.
  int corner_index() const noexcept;

 private:
  std::vector<double> probs_;
};

using PriorSpec = FilterState;

/// J(p, y): the posterior after one claim of size y.
FilterState jump_update(const FilterState& p, double y, const ClaimMixture& mixture);

/// Bayes rule for a batch of claims, accumulated in log space.
FilterState batch_posterior(const PriorSpec& prior, std::span<const double> claims, const ClaimMixture& mixture);

/// Posterior predictive claim density sum_k p_k f_k(y).
double predictive_density(const FilterState& p, double y, const ClaimMixture& mixture);

/// Piecewise-constant filter trajectory keyed by claim times.
class FilterPath {
 public:
  FilterPath(double t0, FilterState initial);

  void record_jump(double time, const FilterState& after);
  /// p_t (right-continuous).
  const FilterState& at(double t) const;
  /// p_{t-} (left limit).
  const FilterState& before(double t) const;

  std::span<const double> jump_times() const noexcept { return times_; }
  const std::vector<FilterState>& states() const noexcept { return states_; }

 private:
  std::vector<double> times_;        // times_[0] = t0
  std::vector<FilterState> states_;  // states_[i] holds on [times_[i], times_[i+1])
};

}  // namespace catre
