#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "finsler/metrics.hpp"
#include "finsler/qmc.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

/// omega_n = vol of the Euclidean unit ball, pi^(n/2) / Gamma(n/2 + 1).
inline double euclidean_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

namespace detail {

/// Integral of f over the unit sphere S^(n-1), n = 2 or 3, by spectrally
/// converging product rules (periodic trapezoid in the angle, doubling
/// Gauss-Legendre in the polar variable).
inline double sphere_surface_integral(int n, const std::function<double(const Vec&)>& f,
                                      double rel_tol = 1e-9) {
  if (n == 2) {
    auto eval_m = [&](int m) {
      double s = 0;
      for (int i = 0; i < m; ++i) {
        double th = 2.0 * std::numbers::pi * i / m;
        s += f({std::cos(th), std::sin(th)});
      }
      return s * 2.0 * std::numbers::pi / m;
    };
    double prev = eval_m(16);
    for (int m = 32; m <= 1 << 16; m *= 2) {
      double cur = eval_m(m);
      if (std::fabs(cur - prev) <= rel_tol * std::max(1.0, std::fabs(cur))) return cur;
      prev = cur;
    }
    return prev;
  }
  if (n == 3) {
    auto eval_m = [&](int mz, int mt) {
      // composite 16-pt Gauss-Legendre in z = cos(polar), trapezoid in azimuth
      double acc = 0;
      for (int p = 0; p < mz; ++p) {
        double a = -1.0 + 2.0 * p / mz, b = -1.0 + 2.0 * (p + 1) / mz;
        double c = 0.5 * (a + b), hw = 0.5 * (b - a);
        for (int i = 0; i < 16; ++i) {
          double z = c + hw * kGL16X[i];
          double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
          double ring = 0;
          for (int it = 0; it < mt; ++it) {
            double th = 2.0 * std::numbers::pi * it / mt;
            ring += f({rho * std::cos(th), rho * std::sin(th), z});
          }
          acc += kGL16W[i] * hw * ring * 2.0 * std::numbers::pi / mt;
        }
      }
      return acc;
    };
    double prev = eval_m(2, 24);
    for (int k = 1; k <= 7; ++k) {
      double cur = eval_m(2 << k, 24 << k);
      if (std::fabs(cur - prev) <= rel_tol * std::max(1.0, std::fabs(cur))) return cur;
      prev = cur;
    }
    return prev;
  }
  throw std::invalid_argument("sphere_surface_integral supports n = 2 or 3");
}

}  // namespace detail

struct VolumeResult {
  double value = 0;
  double standard_error = 0;  // nonzero only on the QMC path (n >= 4)
};

/// Euclidean volume of the unit ball {gauge < 1} of a 1-homogeneous gauge:
/// vol = (1/n) * integral over S^(n-1) of gauge(w)^(-n). Deterministic
/// quadrature for n = 2,3; quasi-Monte Carlo direction sampling for n >= 4.
inline VolumeResult gauge_ball_volume(int n, const std::function<double(const Vec&)>& gauge) {
  if (n <= 1) throw std::invalid_argument("gauge_ball_volume requires n >= 2");
  if (n <= 3) {
    double I = detail::sphere_surface_integral(
        n, [&](const Vec& w) { return std::pow(gauge(w), -n); }, 1e-8);
    return {I / n, 0.0};
  }
  const long long samples = 65536;
  auto dirs = sphere_directions(n, static_cast<int>(samples));
  double sum = 0, sumsq = 0;
  for (auto& w : dirs) {
    double v = std::pow(gauge(w), -n);
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / samples;
  double var = std::max(0.0, sumsq / samples - mean * mean);
  double wn = euclidean_ball_volume(n);
  return {wn * mean, wn * std::sqrt(var / samples)};
}

inline VolumeResult domain_volume(const ConvexDomain& domain) {
  return gauge_ball_volume(domain.dim(), [&](const Vec& w) { return domain.norm(w); });
}

/// Busemann-Hausdorff density at x: omega_n / vol{y : F(x,y) < 1}, computed
/// from the x-dependent unit ball. For Funk metrics the unit ball is the
/// translate Omega - x, so the result is x-independent.
inline double bh_density(const FinslerMetricSpec& spec, const Vec& x) {
  detail::check_point(spec, x, "bh_density");
  auto vol = gauge_ball_volume(spec.dim, [&](const Vec& w) { return spec.eval<double>(x, w); });
  return euclidean_ball_volume(spec.dim) / vol.value;
}

/// A smooth positive measure dm = sigma(x) dx over the metric's domain.
/// BusemannHausdorff resolves against a metric at construction: Funk-type and
/// Minkowski metrics have constant BH density; the interpolated ball family
/// has the closed Randers-ball form; for the Hilbert metric the measure of
/// record is the BH measure of the underlying Funk metric (also constant).
struct MeasureSpec {
  enum class Kind { Lebesgue, BusemannHausdorff, ConstantDensity };

  Kind kind = Kind::Lebesgue;
  double c = 1.0;           // ConstantDensity value
  double bh_constant = 0;   // resolved constant BH density, when constant
  double interp_a = -1.0;   // >= 0: interpolated-ball closed form with this a
  int dim = 0;

  static MeasureSpec lebesgue() { return {Kind::Lebesgue, 1.0, 0.0, -1.0, 0}; }
  static MeasureSpec constant_density(double value) {
    if (!(value > 0)) throw std::invalid_argument("density constant must be positive");
    return {Kind::ConstantDensity, value, 0.0, -1.0, 0};
  }
  static MeasureSpec busemann_hausdorff(const FinslerMetricSpec& spec) {
    MeasureSpec m;
    m.kind = Kind::BusemannHausdorff;
    m.dim = spec.dim;
    switch (spec.kind) {
      case FinslerMetricSpec::Kind::InterpolatedFunk:
        m.interp_a = spec.a;
        break;
      case FinslerMetricSpec::Kind::ExplicitBallFunk:
        m.bh_constant = 1.0;  // omega_n / vol(B^n)
        break;
      case FinslerMetricSpec::Kind::Minkowski:
      case FinslerMetricSpec::Kind::Funk:
      case FinslerMetricSpec::Kind::Hilbert: {
        auto vol = domain_volume(spec.domain());
        m.bh_constant = euclidean_ball_volume(spec.dim) / vol.value;
        break;
      }
    }
    return m;
  }

  double density(const Vec& x) const {
    switch (kind) {
      case Kind::Lebesgue: return 1.0;
      case Kind::ConstantDensity: return c;
      case Kind::BusemannHausdorff: {
        if (interp_a >= 0.0) {
          double s = dot(x, x);
          double n1 = static_cast<double>(dim) + 1.0;
          return std::pow((1.0 - interp_a * interp_a * s) / (1.0 - s), 0.5 * n1);
        }
        return bh_constant;
      }
    }
    throw std::logic_error("unknown measure kind");
  }

  /// grad of ln(sigma); identically zero for constant densities.
  Vec grad_log_density(const Vec& x) const {
    Vec g(x.size(), 0.0);
    if (kind == Kind::BusemannHausdorff && interp_a >= 0.0) {
      double s = dot(x, x);
      double a2 = interp_a * interp_a;
      double coef = (static_cast<double>(dim) + 1.0) * (1.0 / (1.0 - s) - a2 / (1.0 - a2 * s));
      for (size_t i = 0; i < x.size(); ++i) g[i] = coef * x[i];
    }
    return g;
  }
};

/// Polar radial profile of the Funk metric with BH measure from the origin:
/// (1 - e^-r)^(n-1) e^-r per unit angular factor.
inline double polar_density_funk(int n, double r) {
  if (!(r > 0)) throw std::domain_error("polar_density_funk: r must be positive");
  double s = -std::expm1(-r);  // 1 - e^-r
  return std::pow(s, n - 1) * std::exp(-r);
}

/// Comparison functions s_k, c_k and the volume-comparison bound
/// r -> e^(-(n-1) h r) * s_{-k^2}(r)^(n-1).
struct ComparisonProfile {
  double k = 0;
  double h = 0;
  int n = 2;

  static double s_k(double k, double t) {
    if (k > 0) {
      double rk = std::sqrt(k);
      return std::sin(rk * t) / rk;
    }
    if (k == 0) return t;
    double rk = std::sqrt(-k);
    return std::sinh(rk * t) / rk;
  }
  static double c_k(double k, double t) {
    if (k > 0) return std::cos(std::sqrt(k) * t);
    if (k == 0) return 1.0;
    return std::cosh(std::sqrt(-k) * t);
  }

  double bound(double r) const {
    return std::exp(-(n - 1) * h * r) * std::pow(s_k(-k * k, r), n - 1);
  }
};

struct ComparisonRow {
  double r, density, bound, ratio;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double max_ratio = 0;
  double worst_r = 0;
  bool bound_holds = false;
  bool equality_case = false;  // ratio = 1 everywhere within tolerance
};

/// Checks density(r) <= bound(r) (1 + tol) on the grid; for constant-flag
/// equality cases the ratio must be 1 everywhere.
inline ComparisonReport check_comparison(const ComparisonProfile& profile,
                                         const std::function<double(double)>& density,
                                         const std::vector<double>& r_grid, double tol = 1e-8) {
  ComparisonReport rep;
  rep.max_ratio = -std::numeric_limits<double>::infinity();
  double min_ratio = std::numeric_limits<double>::infinity();
  for (double r : r_grid) {
    double d = density(r);
    double b = profile.bound(r);
    double ratio = d / b;
    rep.rows.push_back({r, d, b, ratio});
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst_r = r;
    }
    min_ratio = std::min(min_ratio, ratio);
  }
  rep.bound_holds = rep.max_ratio <= 1.0 + tol;
  rep.equality_case = rep.bound_holds && min_ratio >= 1.0 - tol;
  return rep;
}

struct DistortionIntegral {
  double analytic = 0;          // (sigma(o)/sigma_BH(o)) * n * omega_n
  double numeric = 0;           // n = 2 indicatrix quadrature; 0 otherwise
  bool numeric_available = false;
};

/// Integral of the distortion factor over the unit indicatrix at o. The
/// analytic value n*omega_n holds for the BH measure and scales linearly in
/// the density; in n = 2 the indicatrix line integral is computed directly
/// (angle parametrization, line element from the fundamental tensor).
inline DistortionIntegral integral_of_distortion(const FinslerMetricSpec& spec,
                                                 const MeasureSpec& measure, const Vec& o) {
  detail::check_point(spec, o, "integral_of_distortion");
  const int n = spec.dim;
  DistortionIntegral out;
  double n_omega = n * euclidean_ball_volume(n);
  if (measure.kind == MeasureSpec::Kind::BusemannHausdorff) {
    out.analytic = n_omega;
  } else {
    out.analytic = measure.density(o) / bh_density(spec, o) * n_omega;
  }
  if (n == 2) {
    double sigma_o = measure.kind == MeasureSpec::Kind::BusemannHausdorff
                         ? bh_density(spec, o)
                         : measure.density(o);
    auto integrand = [&](double theta) {
      // y(theta) = u(theta)/F(o, u(theta)) on the indicatrix, differentiated in theta
      VecT<dual1> od = {dual1(o[0], 0.0), dual1(o[1], 0.0)};
      dual1 th(theta, 1.0);
      VecT<dual1> u = {cos(th), sin(th)};
      dual1 F = spec.eval<dual1>(od, u);
      VecT<dual1> y = {u[0] / F, u[1] / F};
      Vec yv = {y[0].val, y[1].val};
      Vec ydot = {y[0].dot, y[1].dot};
      Mat g = fundamental_tensor(spec, o, yv);
      double line = std::sqrt(dot(ydot, matvec(g, ydot)));
      double e_tau = sigma_o / std::sqrt(determinant(g));
      return e_tau * line;
    };
    // periodic trapezoid, doubling until stable
    auto eval_m = [&](int m) {
      double s = 0;
      for (int i = 0; i < m; ++i) s += integrand(2.0 * std::numbers::pi * i / m);
      return s * 2.0 * std::numbers::pi / m;
    };
    double prev = eval_m(64), cur = prev;
    for (int m = 128; m <= 8192; m *= 2) {
      cur = eval_m(m);
      if (std::fabs(cur - prev) < 1e-10 * std::max(1.0, std::fabs(cur))) break;
      prev = cur;
    }
    out.numeric = cur;
    out.numeric_available = true;
  }
  return out;
}

struct FinitenessProbe {
  double value = 0;
  bool diverged = false;
};

/// Radial probe of int_{B+_o(R)} r^-p dm on a Funk metric with constant
/// density, base point o = origin: the angular factor is
/// (sigma/sigma_BH) n omega_n and the radial factor uses the polar profile.
/// Divergence (p >= n) is detected by the quadrature's endpoint decay test.
inline FinitenessProbe local_finiteness_probe(const FinslerMetricSpec& spec,
                                              const MeasureSpec& measure, const Vec& o, double p,
                                              double R, const QuadratureConfig& quad = {}) {
  if (!(R > 0)) throw std::invalid_argument("local_finiteness_probe: R must be positive");
  detail::check_point(spec, o, "local_finiteness_probe");
  if (!detail::is_zero(o))
    throw std::invalid_argument("local_finiteness_probe: radial reduction requires o = origin");
  const int n = spec.dim;
  double angular = measure.kind == MeasureSpec::Kind::BusemannHausdorff
                       ? n * euclidean_ball_volume(n)
                       : measure.density(o) / bh_density(spec, o) * n * euclidean_ball_volume(n);
  double s_max = -std::expm1(-R);
  auto res = radial_profile_integral([&](double r) { return std::pow(r, -p); }, n, s_max, quad);
  FinitenessProbe probe;
  probe.diverged = res.diverged;
  probe.value = res.diverged ? std::numeric_limits<double>::infinity() : angular * res.value;
  return probe;
}

}  // namespace finsler
