#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "finsler/linalg.hpp"

namespace finsler {

namespace detail {

inline double halton(unsigned long long index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

inline constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

/// Inverse of the standard normal CDF (Acklam's rational approximation);
/// accurate to ~1e-9, plenty for direction generation.
inline double inv_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, x;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= phigh) {
    q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  return x;
}

}  // namespace detail

/// Deterministic low-discrepancy unit directions: equal angles (n=2),
/// Fibonacci spiral (n=3), Halton-Gaussian (n>=4).
inline std::vector<Vec> sphere_directions(int n, int count) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (n == 1) {
    dirs.push_back({1.0});
    dirs.push_back({-1.0});
    return dirs;
  }
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      double th = 2.0 * std::numbers::pi * i / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  if (n == 3) {
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / count;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double th = ga * i;
      dirs.push_back({rho * std::cos(th), rho * std::sin(th), z});
    }
    return dirs;
  }
  for (int i = 0; i < count; ++i) {
    Vec v(n);
    for (int j = 0; j < n; ++j) {
      double u = detail::halton(i + 1, detail::kPrimes[j % 12]);
      u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
      v[j] = detail::inv_normal_cdf(u);
    }
    dirs.push_back(normalized(std::move(v)));
  }
  return dirs;
}

struct SphereMaxResult {
  Vec direction;
  double value = 0;
  double gradient_residual = 0;
  bool converged = false;
};

/// Maximize a smooth 0-homogeneous objective over unit directions:
/// low-discrepancy scan followed by projected gradient ascent from the best
/// starts. Gradient by central differences; ascent with backtracking.
inline SphereMaxResult maximize_over_sphere(const std::function<double(const Vec&)>& f, int n,
                                            int scan_budget = 4096, int starts = 4,
                                            double grad_tol = 1e-10, int max_iter = 400,
                                            const std::vector<Vec>& extra_starts = {}) {
  auto dirs = sphere_directions(n, scan_budget);
  for (const auto& e : extra_starts) dirs.push_back(normalized(e));
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(dirs.size());
  for (int i = 0; i < static_cast<int>(dirs.size()); ++i) ranked.emplace_back(f(dirs[i]), i);
  std::sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.first > b.first; });
  int refine_count = starts + static_cast<int>(extra_starts.size());

  SphereMaxResult best;
  best.value = -std::numeric_limits<double>::infinity();

  const double h = 1e-7;
  for (int s = 0; s < std::min<int>(refine_count, ranked.size()); ++s) {
    Vec u = dirs[ranked[s].second];
    double fu = ranked[s].first;
    double res = 0;
    bool conv = false;
    for (int it = 0; it < max_iter; ++it) {
      // projected central-difference gradient on the sphere
      Vec g(n, 0.0);
      for (int j = 0; j < n; ++j) {
        Vec up = u, um = u;
        up[j] += h;
        um[j] -= h;
        g[j] = (f(normalized(up)) - f(normalized(um))) / (2 * h);
      }
      double gu = dot(g, u);
      for (int j = 0; j < n; ++j) g[j] -= gu * u[j];
      res = norm2(g);
      double scale = std::max(1.0, std::fabs(fu));
      if (res < grad_tol * scale) { conv = true; break; }
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        Vec trial = u;
        for (int j = 0; j < n; ++j) trial[j] += step * g[j];
        trial = normalized(std::move(trial));
        double ft = f(trial);
        if (ft > fu + 0.25 * step * res * res) {
          u = std::move(trial);
          fu = ft;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) { conv = res < 1e-6 * scale; break; }
    }
    if (fu > best.value) {
      best.value = fu;
      best.direction = u;
      best.gradient_residual = res;
      best.converged = conv;
    }
  }
  return best;
}

}  // namespace finsler
