#pragma once

// Deterministic sample generators shared by the test suites.

#include <vector>

#include "finsler/linalg.hpp"
#include "finsler/sphere_search.hpp"

namespace test_helpers {

using finsler::Vec;

/// Deterministic pseudo-random vectors with entries in (-1, 1), Halton-fed.
inline std::vector<Vec> sample_vectors(int n, int count, unsigned skip = 0) {
  std::vector<Vec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec v(n);
    for (int j = 0; j < n; ++j)
      v[j] = 2.0 * finsler::detail::halton(i + 17 + skip, finsler::detail::kPrimes[j % 12]) - 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

/// Interior points of the unit ball with |x| <= rho_max.
inline std::vector<Vec> sample_ball_points(int n, int count, double rho_max = 0.8,
                                           unsigned skip = 100) {
  std::vector<Vec> out;
  out.reserve(count);
  auto dirs = finsler::sphere_directions(n, count);
  for (int i = 0; i < count; ++i) {
    double u = finsler::detail::halton(i + 23 + skip, 7);
    out.push_back((rho_max * std::pow(u, 1.0 / n)) * dirs[i]);
  }
  return out;
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
inline bool near_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * std::max(1e-300, std::fabs(b));
}

}  // namespace test_helpers
