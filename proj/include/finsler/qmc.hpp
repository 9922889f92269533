#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "finsler/linalg.hpp"
#include "finsler/quadrature.hpp"
#include "finsler/sphere_search.hpp"

namespace finsler {

struct MonteCarloResult {
  double value = 0;
  double standard_error = 0;
  long long accepted = 0;
  long long total = 0;
};

/// Quasi-Monte Carlo over an axis-aligned box with rejection onto a region.
/// Halton points (bases 2,3,5,...) shifted by the seed, so a fixed seed gives
/// a fixed point set. The standard error is the iid-style estimate from the
/// sample variance, a conservative proxy for the QMC error.
inline MonteCarloResult qmc_box_integral(const std::function<bool(const Vec&)>& inside,
                                         const std::function<double(const Vec&)>& integrand,
                                         const Vec& lo, const Vec& hi, long long samples,
                                         unsigned long long seed) {
  const int n = static_cast<int>(lo.size());
  double box_vol = 1.0;
  for (int j = 0; j < n; ++j) box_vol *= hi[j] - lo[j];

  double sum = 0, sumsq = 0;
  long long accepted = 0;
  Vec x(n);
  const unsigned long long offset = 4096 + seed;
  for (long long i = 0; i < samples; ++i) {
    for (int j = 0; j < n; ++j) {
      double u = detail::halton(static_cast<unsigned long long>(i) + offset,
                                detail::kPrimes[j % 12]);
      x[j] = lo[j] + (hi[j] - lo[j]) * u;
    }
    double v = 0;
    if (inside(x)) {
      v = integrand(x);
      ++accepted;
    }
    sum += v;
    sumsq += v * v;
  }
  MonteCarloResult out;
  out.total = samples;
  out.accepted = accepted;
  double mean = sum / samples;
  double var = std::max(0.0, sumsq / samples - mean * mean);
  out.value = box_vol * mean;
  out.standard_error = box_vol * std::sqrt(var / samples);
  return out;
}

}  // namespace finsler
