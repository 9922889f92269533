#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace finsler {

/// Tolerances and budgets shared by the integration and search routines.
struct QuadratureConfig {
  double radial_abs_tol = 1e-10;
  double radial_rel_tol = 1e-10;
  int max_cells = 20000;
  int grading_levels = 60;       // geometric cells 2^-j toward each endpoint
  long long mc_samples = 1000000;
  unsigned long long mc_seed = 20240501;
  double fd_step_scale = 1.0;    // multiplies the default eps^(1/3) step
  int sphere_budget = 4096;
  double contrast_truncation_radius = 10.0;  // bubble support cutoff for the positive control
};

namespace detail {

// 16-point Gauss-Legendre nodes/weights on [-1,1].
inline constexpr double kGL16X[16] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
inline constexpr double kGL16W[16] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

inline double gl16(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), hw = 0.5 * (b - a), s = 0;
  for (int i = 0; i < 16; ++i) s += kGL16W[i] * f(c + hw * kGL16X[i]);
  return s * hw;
}

// Contributions ordered shallow -> deep toward an endpoint. An integrable
// singularity decays geometrically; constant or growing tails (the s^-1
// borderline and worse) do not.
inline bool no_geometric_decay(const std::vector<double>& c) {
  int hits = 0, checked = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 1 && checked < 6; --i, ++checked) {
    double deep = std::fabs(c[i]);
    double shallow = std::fabs(c[i - 1]);
    if (deep == 0.0) return false;
    if (deep > 0.95 * shallow)
      ++hits;
    else
      return false;
  }
  return hits >= 3;
}

}  // namespace detail

struct IntegralResult {
  double value = 0;
  double error_estimate = 0;
  bool converged = false;
  bool diverged = false;  // endpoint cell contributions stopped decaying
};

/// Adaptive Gauss-Legendre on (a,b), geometrically graded toward both
/// endpoints: seed cells [a + L 2^-(j+1), a + L 2^-j] and mirror images, 16
/// points per cell (nodes stay interior, so endpoint singularities are never
/// evaluated), then bisection of cells whose split estimate disagrees.
inline IntegralResult integrate_graded(const std::function<double(double)>& f, double a, double b,
                                       const QuadratureConfig& quad = {}) {
  IntegralResult out;
  if (!(b > a)) return {0.0, 0.0, true, false};
  const int J = quad.grading_levels;
  const double len = b - a;

  struct Cell { double lo, hi, est; int depth; };
  std::deque<Cell> cells;
  std::vector<double> left_contrib, right_contrib;  // shallow -> deep
  left_contrib.reserve(J);
  right_contrib.reserve(J);

  auto seed = [&](double lo, double hi) {
    cells.push_back({lo, hi, detail::gl16(f, lo, hi), 0});
    return cells.back().est;
  };

  for (int j = 1; j <= J; ++j)
    left_contrib.push_back(seed(a + len * std::ldexp(1.0, -(j + 1)), a + len * std::ldexp(1.0, -j)));
  for (int j = 1; j <= J; ++j)
    right_contrib.push_back(seed(b - len * std::ldexp(1.0, -j), b - len * std::ldexp(1.0, -(j + 1))));
  // endpoint slivers beyond the deepest graded level
  seed(a, a + len * std::ldexp(1.0, -(J + 1)));
  seed(b - len * std::ldexp(1.0, -(J + 1)), b);

  if (detail::no_geometric_decay(left_contrib) || detail::no_geometric_decay(right_contrib)) {
    out.diverged = true;
    return out;
  }

  double total = 0;
  for (auto& c : cells) total += c.est;

  int n_cells = static_cast<int>(cells.size());
  double err_acc = 0, value = 0;
  while (!cells.empty()) {
    Cell c = cells.front();
    cells.pop_front();
    double mid = 0.5 * (c.lo + c.hi);
    double e1 = detail::gl16(f, c.lo, mid);
    double e2 = detail::gl16(f, mid, c.hi);
    double diff = std::fabs(e1 + e2 - c.est);
    double cell_tol =
        (quad.radial_abs_tol + quad.radial_rel_tol * std::fabs(total)) / (2.0 * J + 2.0);
    if (diff < cell_tol || c.depth > 48 || n_cells >= quad.max_cells) {
      value += e1 + e2;
      err_acc += diff;
    } else {
      cells.push_back({c.lo, mid, e1, c.depth + 1});
      cells.push_back({mid, c.hi, e2, c.depth + 1});
      n_cells += 2;
    }
  }
  out.value = value;
  out.error_estimate = err_acc;
  out.converged =
      err_acc < 20 * (quad.radial_abs_tol + quad.radial_rel_tol * std::fabs(value)) &&
      n_cells < quad.max_cells;
  return out;
}

/// int_0^{s_max} g(r(s)) s^(n-1) ds with r(s) = -ln(1-s): the radial part of
/// the polar disintegration of a Funk metric from the origin (per unit
/// angular factor).
///
/// Two pieces. Near r = 0 the substitution s = (s_max/2) u^4 deepens the
/// grading so power singularities r^-p integrate to machine precision for
/// p < n, and the borderline p >= n trips the divergence flag. The tail
/// r in [r0, -ln(1-s_max)) uses r = r0 - ln(w): the e^-r weight cancels the
/// Jacobian exactly, so s_max = 1 (r -> infinity) needs no special casing.
inline IntegralResult radial_profile_integral(const std::function<double(double)>& g, int n,
                                              double s_max = 1.0,
                                              const QuadratureConfig& quad = {}) {
  const double s_split = 0.5 * s_max;
  auto left_integrand = [&](double u) {
    double s = s_split * u * u * u * u;
    double r = -std::log1p(-s);
    return g(r) * std::pow(s, n - 1) * s_split * 4.0 * u * u * u;
  };
  auto left = integrate_graded(left_integrand, 0.0, 1.0, quad);
  if (left.diverged) return left;

  const double r0 = -std::log1p(-s_split);
  const double em_r0 = 1.0 - s_split;             // e^-r0
  const double w_min = (1.0 - s_max) / em_r0;      // e^-(Rtop - r0); 0 at s_max = 1
  auto tail_integrand = [&](double w) {
    double r = r0 - std::log(w);
    double one_minus_s = em_r0 * w;                 // 1 - s = e^-r
    return g(r) * std::pow(1.0 - one_minus_s, n - 1);
  };
  auto tail = integrate_graded(tail_integrand, w_min, 1.0, quad);

  IntegralResult out;
  out.diverged = tail.diverged;
  out.converged = left.converged && tail.converged;
  out.value = left.value + em_r0 * tail.value;
  out.error_estimate = left.error_estimate + em_r0 * tail.error_estimate;
  return out;
}

/// Throwing wrapper for integrals that must converge.
inline double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                                 const QuadratureConfig& quad = {}, const char* what = "integral") {
  auto r = integrate_graded(f, a, b, quad);
  if (r.diverged)
    throw std::runtime_error(std::string(what) + ": integrand diverges at an endpoint");
  if (!r.converged)
    throw std::runtime_error(std::string(what) + ": quadrature did not converge (last estimate " +
                             std::to_string(r.value) + ", error " +
                             std::to_string(r.error_estimate) + ")");
  return r.value;
}

}  // namespace finsler
