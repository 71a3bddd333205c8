#include "catre/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "catre/error.hpp"

namespace catre {

namespace {

void enumerate(std::size_t m, int remaining, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (current.size() + 1 == m) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current.push_back(k);
    enumerate(m, remaining - k, current, out);
    current.pop_back();
  }
}

}  // namespace

SimplexLattice::SimplexLattice(std::size_t dimension, int divisions) : m_(dimension), n_(divisions) {
  if (m_ < 1) throw InvalidArgument("simplex dimension must be at least 1");
  if (n_ < 1) throw InvalidArgument("simplex lattice needs at least one division");
  if (m_ > 4) throw InvalidArgument("simplex lattices are supported up to m = 4 families");
  std::vector<int> cur;
  enumerate(m_, n_, cur, counts_);
  for (std::size_t i = 0; i < counts_.size(); ++i) index_.emplace(key(counts_[i]), i);
}

std::size_t SimplexLattice::key(std::span<const int> k) const {
  std::size_t h = 0;
  for (std::size_t j = 0; j + 1 < m_; ++j) h = h * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(k[j]);
  return h;
}

std::vector<double> SimplexLattice::point(std::size_t i) const {
  std::vector<double> p(m_);
  for (std::size_t j = 0; j < m_; ++j) p[j] = static_cast<double>(counts_[i][j]) / n_;
  return p;
}

std::size_t SimplexLattice::find(std::span<const int> k) const {
  if (k.size() != m_) return npos;
  int sum = 0;
  for (int v : k) {
    if (v < 0) return npos;
    sum += v;
  }
  if (sum != n_) return npos;
  auto it = index_.find(key(k));
  return it == index_.end() ? npos : it->second;
}

std::size_t SimplexLattice::corner(std::size_t j) const {
  std::vector<int> k(m_, 0);
  k.at(j) = n_;
  return find(k);
}

std::vector<StencilEntry> SimplexLattice::stencil(std::span<const double> p) const {
  if (p.size() != m_) throw InvalidArgument("point dimension does not match the lattice");
  if (m_ == 1) return {{0, 1.0}};
  const std::size_t d = m_ - 1;
  // Cumulative coordinates, clamped to the lattice box.
  std::vector<double> c(d);
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    acc += p[i];
    c[i] = std::clamp(acc * n_, 0.0, static_cast<double>(n_));
  }
  for (std::size_t i = 1; i < d; ++i) c[i] = std::max(c[i], c[i - 1]);

  std::vector<int> base(d);
  std::vector<double> frac(d);
  for (std::size_t i = 0; i < d; ++i) {
    double fl = std::floor(c[i]);
    if (fl >= n_) fl = n_ - 1;
    base[i] = static_cast<int>(fl);
    frac[i] = c[i] - fl;
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });

  auto node_of = [&](const std::vector<int>& cum) {
    std::vector<int> k(m_);
    int prev = 0;
    for (std::size_t i = 0; i < d; ++i) {
      k[i] = cum[i] - prev;
      prev = cum[i];
    }
    k[d] = n_ - prev;
    const std::size_t idx = find(k);
    if (idx == npos) throw InvalidArgument("simplex interpolation left the lattice");
    return idx;
  };

  std::vector<StencilEntry> out;
  out.reserve(m_);
  std::vector<int> vertex = base;
  double w0 = 1.0 - frac[order[0]];
  if (w0 > 0.0) out.push_back({node_of(vertex), w0});
  for (std::size_t k = 0; k < d; ++k) {
    vertex[order[k]] += 1;
    const double w = frac[order[k]] - (k + 1 < d ? frac[order[k + 1]] : 0.0);
    if (w > 0.0) out.push_back({node_of(vertex), w});
  }
  return out;
}

double SimplexLattice::interpolate(std::span<const double> values, std::span<const double> p) const {
  double v = 0.0;
  for (const auto& e : stencil(p)) v += e.weight * values[e.node];
  return v;
}

std::vector<std::vector<std::size_t>> SimplexLattice::edge_lines() const {
  std::vector<std::vector<std::size_t>> lines;
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = i + 1; j < m_; ++j) {
      // Start at nodes with k_i = 0 and move mass from j to i.
      for (std::size_t s = 0; s < counts_.size(); ++s) {
        if (counts_[s][i] != 0) continue;
        std::vector<std::size_t> line{s};
        std::vector<int> k = counts_[s];
        while (k[j] > 0) {
          --k[j];
          ++k[i];
          line.push_back(find(k));
        }
        if (line.size() >= 3) lines.push_back(std::move(line));
      }
    }
  }
  return lines;
}

}  // namespace catre
