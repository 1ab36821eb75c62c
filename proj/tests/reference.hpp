#pragma once

// Test-side reference computations. Each one is written independently of the
// library (plain loops, no shared helpers) so that agreement is evidence.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <map>
#include <algorithm>
#include <numbers>
#include <utility>
#include <vector>

namespace ref {

// vol_d(r) by the recurrence vol_d = vol_{d-2} * 2 pi / d, vol_0 = 1, vol_1 = 2.
inline double ball_volume(int d, double r) {
  double v = (d % 2 == 0) ? 1.0 : 2.0;
  for (int k = (d % 2 == 0) ? 2 : 3; k <= d; k += 2) v *= 2.0 * std::numbers::pi / k;
  return v * std::pow(r, d);
}

// Probabilities of every size-`k` index subset under det(Gram minor).
inline std::map<std::vector<int>, double> volume_probabilities(
    const Eigen::MatrixXd& gram, int k) {
  const int n = static_cast<int>(gram.rows());
  std::map<std::vector<int>, double> out;
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::vector<int> ids;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) ids.push_back(i);
    }
    Eigen::MatrixXd minor(k, k);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) minor(a, b) = gram(ids[a], ids[b]);
    }
    const double det = std::max(minor.determinant(), 0.0);
    out[ids] = det;
    total += det;
  }
  for (auto& [ids, p] : out) p /= total;
  return out;
}

using Edges = std::vector<std::pair<int, int>>;

inline int cut_of(const Edges& edges, std::uint32_t side) {
  int c = 0;
  for (auto [u, v] : edges) c += ((side >> u) & 1u) != ((side >> v) & 1u);
  return c;
}

inline int max_cut(int n, const Edges& edges) {
  int best = 0;
  for (std::uint32_t s = 0; s < (1u << n); ++s) best = std::max(best, cut_of(edges, s));
  return best;
}

inline int min_bisection(int n, const Edges& edges) {
  int best = 1 << 30;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    const int ones = __builtin_popcount(s);
    if (ones != n / 2 && ones != (n + 1) / 2) continue;
    best = std::min(best, cut_of(edges, s));
  }
  return best;
}

// Distribution over 0/1 points: (bitmask of ones, probability).
using Atoms = std::vector<std::pair<std::uint64_t, double>>;

// P[every variable in `ones` is 1 and every variable in `zeros` is 0].
inline double event_probability(const Atoms& atoms, std::uint64_t ones,
                                std::uint64_t zeros) {
  double p = 0.0;
  for (auto [point, w] : atoms) {
    if ((point & ones) == ones && (point & zeros) == 0) p += w;
  }
  return p;
}

inline double moment(const Atoms& atoms, std::uint64_t set) {
  return event_probability(atoms, set, 0);
}

// Normalized Laplacian eigenvalues of the n-cycle: 1 - cos(2 pi j / n).
inline std::vector<double> cycle_spectrum(int n) {
  std::vector<double> v;
  for (int j = 0; j < n; ++j) v.push_back(1.0 - std::cos(2.0 * std::numbers::pi * j / n));
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace ref
