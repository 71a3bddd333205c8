#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

namespace catre {

/// Weight of one lattice node in a barycentric interpolation stencil.
struct StencilEntry {
  std::size_t node;
  double weight;
};

/// Regular lattice {k / N : k in N^m, |k| = N} on the probability simplex.
///
/// Interpolation is piecewise linear on the Kuhn triangulation of the
/// cumulative coordinates c_i = N (p_1 + ... + p_i), i < m, which makes the
/// lattice an integer grid restricted to 0 <= c_1 <= ... <= c_{m-1} <= N.
class SimplexLattice {
 public:
  SimplexLattice(std::size_t dimension, int divisions);

  std::size_t dimension() const noexcept { return m_; }
  int divisions() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  std::size_t node_count() const noexcept { return counts_.size(); }

  /// Integer composition k of node i (sums to N).
  std::span<const int> counts(std::size_t i) const { return counts_[i]; }
  std::vector<double> point(std::size_t i) const;

  /// Node index of a composition, or npos.
  std::size_t find(std::span<const int> k) const;
  std::size_t corner(std::size_t j) const;

  /// At most m entries with nonnegative weights summing to 1.
  std::vector<StencilEntry> stencil(std::span<const double> p) const;
  double interpolate(std::span<const double> values, std::span<const double> p) const;

  /// Lines of nodes parallel to an edge e_i - e_j, each ordered along the edge
  /// (used for concavity diagnostics).
  std::vector<std::vector<std::size_t>> edge_lines() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t key(std::span<const int> k) const;

  std::size_t m_;
  int n_;
  std::vector<std::vector<int>> counts_;
  std::unordered_map<std::size_t, std::size_t> index_;
};

}  // namespace catre
