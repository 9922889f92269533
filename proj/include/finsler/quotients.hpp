#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/curvature.hpp"
#include "finsler/measure.hpp"
#include "finsler/metrics.hpp"
#include "finsler/qmc.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

/// Radial test functions u(r) with their forced co-gradient profiles
/// F*(du)(r) = u'(r) (the eikonal equation F*(dr) = 1 turns radial
/// differentials into scalar profiles).
struct TestFunction {
  enum class Kind { GaussianBubble, CKNBubble };

  Kind kind = Kind::GaussianBubble;
  double alpha = 1.0;
  double p = 2.0;  // CKN exponents
  double q = 1.0;

  static TestFunction gaussian(double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("bubble parameter alpha must be positive");
    return {Kind::GaussianBubble, alpha, 2.0, 1.0};
  }
  static TestFunction ckn(double alpha, double p, double q) {
    if (!(alpha > 0)) throw std::invalid_argument("bubble parameter alpha must be positive");
    if (!(0 < q && q < 2 && 2 < p))
      throw std::invalid_argument("CKN bubble requires 0 < q < 2 < p");
    return {Kind::CKNBubble, alpha, p, q};
  }

  double value(double r) const {
    if (kind == Kind::GaussianBubble) return -std::exp(-alpha * r);
    return -std::pow(1.0 + std::pow(alpha * r, 2.0 - q), 1.0 / (2.0 - p));
  }
  /// F*(du)(r); positive for r > 0.
  double co_gradient(double r) const {
    if (kind == Kind::GaussianBubble) return alpha * std::exp(-alpha * r);
    return std::pow(alpha, 2.0 - q) * ((2.0 - q) / (p - 2.0)) *
           std::pow(1.0 + std::pow(alpha * r, 2.0 - q), (p - 1.0) / (2.0 - p)) *
           std::pow(r, 1.0 - q);
  }
};

enum class QuotientKind { Eigenvalue, Hardy, HPW, CKN };

inline std::string quotient_kind_name(QuotientKind k) {
  switch (k) {
    case QuotientKind::Eigenvalue: return "eigenvalue";
    case QuotientKind::Hardy: return "hardy";
    case QuotientKind::HPW: return "hpw";
    case QuotientKind::CKN: return "ckn";
  }
  return "?";
}

/// Sharp constants of the corresponding inequalities in the reversible
/// regime: ((n-p)/p)^p, n^2/4, ((n-q)/p)^2.
inline double sharp_constant(QuotientKind kind, int n, double p = 2.0, double q = 1.0) {
  switch (kind) {
    case QuotientKind::Hardy:
      if (!(1.0 < p && p < n)) throw std::invalid_argument("hardy requires p in (1, n)");
      return std::pow((n - p) / p, p);
    case QuotientKind::HPW:
      if (n < 2) throw std::invalid_argument("hpw requires n >= 2");
      return 0.25 * n * n;
    case QuotientKind::CKN: {
      if (!(0 < q && q < 2 && 2 < p))
        throw std::invalid_argument("ckn requires 0 < q < 2 < p");
      if (!(2 < n && n < 2.0 * (p - q) / (p - 2.0)))
        throw std::invalid_argument("ckn requires 2 < n < 2(p-q)/(p-2)");
      return (n - q) * (n - q) / (p * p);
    }
    case QuotientKind::Eigenvalue:
      throw std::invalid_argument("the eigenvalue quotient has no sharp reference constant");
  }
  throw std::logic_error("unknown quotient kind");
}

/// int over the manifold of g(r(x)) dm for a Funk-type metric with constant
/// density, base point at the origin: angular factor times the radial profile
/// integral (the substitution s = 1 - e^-r collapses the chord geometry).
struct RadialMeasure {
  int n = 0;
  double angular = 0;  // restores absolute normalization; cancels in quotients
  std::function<IntegralResult(const std::function<double(double)>&, const QuadratureConfig&)>
      radial;
};

inline RadialMeasure funk_radial_measure(const FinslerMetricSpec& spec,
                                         const MeasureSpec& measure) {
  if (spec.kind != FinslerMetricSpec::Kind::Funk &&
      spec.kind != FinslerMetricSpec::Kind::ExplicitBallFunk)
    throw std::invalid_argument("radial reduction requires a Funk-type metric");
  const int n = spec.dim;
  Vec origin(n, 0.0);
  double scale = measure.kind == MeasureSpec::Kind::BusemannHausdorff
                     ? 1.0
                     : measure.density(origin) / bh_density(spec, origin);
  RadialMeasure rm;
  rm.n = n;
  rm.angular = scale * n * euclidean_ball_volume(n);
  rm.radial = [n](const std::function<double(double)>& f, const QuadratureConfig& quad) {
    return radial_profile_integral(f, n, 1.0, quad);
  };
  return rm;
}

/// Radial measure of the Klein metric with its Riemannian volume density,
/// truncated at distance r_cut: the weight along rays comes from the
/// fundamental tensor determinant evaluated numerically, and r(t) from the
/// symmetrized Funk distance (no closed hyperbolic form is assumed).
inline RadialMeasure klein_radial_measure(const FinslerMetricSpec& spec, double r_cut) {
  if (spec.kind != FinslerMetricSpec::Kind::InterpolatedFunk || spec.a != 0.0)
    throw std::invalid_argument("klein_radial_measure requires the Klein metric");
  const int n = spec.dim;
  Vec origin(n, 0.0);
  auto r_of_t = [spec, origin, n](double t) {
    Vec x(n, 0.0);
    x[0] = t;
    return funk_distance(spec, origin, x);
  };
  // t_max with r(t_max) = r_cut, by bisection
  double lo = 0.0, hi = 1.0 - 1e-15;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (r_of_t(mid) < r_cut ? lo : hi) = mid;
  }
  double t_max = 0.5 * (lo + hi);

  RadialMeasure rm;
  rm.n = n;
  rm.angular = n * euclidean_ball_volume(n);
  rm.radial = [spec, r_of_t, t_max, n](const std::function<double(double)>& f,
                                       const QuadratureConfig& quad) {
    auto integrand = [&](double t) {
      Vec x(n, 0.0), y(n, 0.0);
      x[0] = t;
      y[0] = 1.0;
      Mat g = fundamental_tensor(spec, x, y, /*check_spd=*/false);
      double w = std::sqrt(determinant(g)) * std::pow(t, n - 1);
      return f(r_of_t(t)) * w;
    };
    return integrate_graded(integrand, 0.0, t_max, quad);
  };
  return rm;
}

/// Flat polar radial measure of a Minkowski metric (r = phi(x) along rays),
/// truncated at r_cut.
inline RadialMeasure minkowski_radial_measure(const FinslerMetricSpec& spec, double r_cut) {
  if (spec.kind != FinslerMetricSpec::Kind::Minkowski)
    throw std::invalid_argument("minkowski_radial_measure requires a Minkowski metric");
  const int n = spec.dim;
  auto vol = domain_volume(spec.domain());
  RadialMeasure rm;
  rm.n = n;
  rm.angular = n * vol.value;
  rm.radial = [r_cut, n](const std::function<double(double)>& f, const QuadratureConfig& quad) {
    auto integrand = [&](double r) { return f(r) * std::pow(r, n - 1); };
    return integrate_graded(integrand, 0.0, r_cut, quad);
  };
  return rm;
}

/// One quotient evaluation: all constituent integrals plus the quotient.
struct QuotientRow {
  double alpha = 0;
  double num1 = 0;   // int F*^p(du) dm
  double num2 = 0;   // second numerator integral (HPW, CKN); 0 otherwise
  double den = 0;    // denominator integral (squared for HPW/CKN quotients)
  double quotient = 0;
};

namespace detail {

inline void validate_quotient_params(QuotientKind kind, int n, double p, double q) {
  switch (kind) {
    case QuotientKind::Eigenvalue:
      if (!(p > 1.0)) throw std::invalid_argument("eigenvalue quotient requires p > 1");
      break;
    case QuotientKind::Hardy:
      if (!(p > 1.0)) throw std::invalid_argument("hardy quotient requires p > 1");
      break;
    case QuotientKind::HPW:
      if (n < 2) throw std::invalid_argument("hpw requires n >= 2");
      break;
    case QuotientKind::CKN:
      if (!(0 < q && q < 2 && 2 < p))
        throw std::invalid_argument("ckn requires 0 < q < 2 < p");
      if (!(2 < n && n < 2.0 * (p - q) / (p - 2.0)))
        throw std::invalid_argument("ckn requires 2 < n < 2(p-q)/(p-2)");
      break;
  }
}

inline double checked_radial(const RadialMeasure& rm, const std::function<double(double)>& f,
                             const QuadratureConfig& quad, const char* which) {
  auto res = rm.radial(f, quad);
  if (res.diverged)
    throw std::runtime_error(std::string("quotient integral diverged: ") + which);
  if (!res.converged)
    throw std::runtime_error(std::string("quotient integral did not converge: ") + which);
  return rm.angular * res.value;
}

}  // namespace detail

/// Evaluate one functional quotient for a radial test function, through the
/// one-dimensional radial reduction (o = origin). The quotient itself is
/// scale-free in the angular constant.
inline QuotientRow quotient_eval_radial(QuotientKind kind, const RadialMeasure& rm,
                                        const TestFunction& tf, double p, double q,
                                        const QuadratureConfig& quad = {},
                                        double truncate_at = 0.0) {
  detail::validate_quotient_params(kind, rm.n, p, q);
  // truncate_at > 0: integrate the compactly supported bubble u - u(R)
  double shift = truncate_at > 0 ? tf.value(truncate_at) : 0.0;
  auto u = [&](double r) { return tf.value(r) - shift; };
  auto cg = [&](double r) { return tf.co_gradient(r); };

  QuotientRow row;
  row.alpha = tf.alpha;
  switch (kind) {
    case QuotientKind::Eigenvalue: {
      row.num1 = detail::checked_radial(
          rm, [&](double r) { return std::pow(cg(r), p); }, quad, "int F*^p(du) dm");
      row.den = detail::checked_radial(
          rm, [&](double r) { return std::pow(std::fabs(u(r)), p); }, quad, "int |u|^p dm");
      row.quotient = row.num1 / row.den;
      break;
    }
    case QuotientKind::Hardy: {
      row.num1 = detail::checked_radial(
          rm, [&](double r) { return std::pow(cg(r), p); }, quad, "int F*^p(du) dm");
      row.den = detail::checked_radial(
          rm, [&](double r) { return std::pow(std::fabs(u(r)) / r, p); }, quad,
          "int |u|^p r^-p dm");
      row.quotient = row.num1 / row.den;
      break;
    }
    case QuotientKind::HPW: {
      row.num1 = detail::checked_radial(
          rm, [&](double r) { return cg(r) * cg(r); }, quad, "int F*^2(du) dm");
      row.num2 = detail::checked_radial(
          rm, [&](double r) { return r * r * u(r) * u(r); }, quad, "int r^2 u^2 dm");
      row.den = detail::checked_radial(
          rm, [&](double r) { return u(r) * u(r); }, quad, "int u^2 dm");
      row.quotient = row.num1 * row.num2 / (row.den * row.den);
      break;
    }
    case QuotientKind::CKN: {
      row.num1 = detail::checked_radial(
          rm, [&](double r) { return cg(r) * cg(r); }, quad, "int F*^2(du) dm");
      row.num2 = detail::checked_radial(
          rm, [&](double r) { return std::pow(std::fabs(u(r)), 2 * p - 2) * std::pow(r, 2 - 2 * q); },
          quad, "int |u|^(2p-2) r^(2-2q) dm");
      row.den = detail::checked_radial(
          rm, [&](double r) { return std::pow(std::fabs(u(r)), p) * std::pow(r, -q); }, quad,
          "int |u|^p r^-q dm");
      row.quotient = row.num1 * row.num2 / (row.den * row.den);
      break;
    }
  }
  return row;
}

/// Quotient evaluation dispatcher: o = origin routes through the radial
/// reduction; any other base point falls back to Monte Carlo integration.
inline QuotientRow quotient_eval(QuotientKind kind, const FinslerMetricSpec& spec,
                                 const MeasureSpec& measure, const Vec& o, const TestFunction& tf,
                                 double p, double q, const QuadratureConfig& quad = {});

struct QuotientSweep {
  QuotientKind kind = QuotientKind::Hardy;
  int n = 0;
  double p = 2.0, q = 1.0;
  std::vector<QuotientRow> rows;       // ordered by decreasing alpha
  std::vector<double> slopes;          // log-log slope between successive rows
  double sharp = 0;                    // sharp reference constant (ctx-dependent)
  bool monotone_decreasing = false;
};

/// Evaluate the quotient along a decreasing alpha grid and read off the
/// power-law slopes.
inline QuotientSweep alpha_sweep(QuotientKind kind, const FinslerMetricSpec& spec,
                                 const MeasureSpec& measure, const std::vector<double>& alphas,
                                 double p, double q, const QuadratureConfig& quad = {}) {
  if (alphas.empty()) throw std::invalid_argument("alpha_sweep: alpha list must be nonempty");
  for (size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0)) throw std::invalid_argument("alpha_sweep: alphas must be positive");
    if (i > 0 && !(alphas[i] < alphas[i - 1]))
      throw std::invalid_argument("alpha_sweep: alphas must be strictly decreasing");
  }
  QuotientSweep sweep;
  sweep.kind = kind;
  sweep.n = spec.dim;
  sweep.p = p;
  sweep.q = q;
  sweep.sharp = kind == QuotientKind::Eigenvalue ? 0.0 : sharp_constant(kind, spec.dim, p, q);

  auto rm = funk_radial_measure(spec, measure);
  for (double a : alphas) {
    TestFunction tf = kind == QuotientKind::CKN ? TestFunction::ckn(a, p, q)
                                                : TestFunction::gaussian(a);
    sweep.rows.push_back(quotient_eval_radial(kind, rm, tf, p, q, quad));
  }
  sweep.monotone_decreasing = true;
  for (size_t i = 0; i + 1 < sweep.rows.size(); ++i) {
    double q0 = sweep.rows[i].quotient, q1 = sweep.rows[i + 1].quotient;
    sweep.slopes.push_back(std::log(q0 / q1) / std::log(alphas[i] / alphas[i + 1]));
    if (!(q1 < q0)) sweep.monotone_decreasing = false;
  }
  return sweep;
}

/// The integral-bound check for the Gaussian bubble family on a Funk metric
/// with BH measure (k = 1/2): both energy integrals stay below the explicit
/// comparison bounds with integral-of-distortion prefactor I_m(o) = n omega_n.
struct BubbleBoundReport {
  double lhs_u = 0, rhs_u = 0;   // int |u|^p dm  <=  I/(p alpha k^(n-1))
  double lhs_g = 0, rhs_g = 0;   // int F*^p(du) dm  <=  alpha^(p-1) I/(p k^(n-1))
  bool holds = false;
};

inline BubbleBoundReport bubble_bound_check(const FinslerMetricSpec& spec,
                                            const MeasureSpec& measure, double alpha, double p,
                                            const QuadratureConfig& quad = {}) {
  if (!(p >= 1.0)) throw std::invalid_argument("bubble_bound_check requires p >= 1");
  auto rm = funk_radial_measure(spec, measure);
  const double k = 0.5;
  const int n = rm.n;
  double I = rm.angular;  // integral of distortion at the origin
  TestFunction tf = TestFunction::gaussian(alpha);
  BubbleBoundReport rep;
  rep.lhs_u = detail::checked_radial(
      rm, [&](double r) { return std::pow(std::fabs(tf.value(r)), p); }, quad, "int |u|^p dm");
  rep.rhs_u = I / (p * alpha * std::pow(k, n - 1));
  rep.lhs_g = detail::checked_radial(
      rm, [&](double r) { return std::pow(tf.co_gradient(r), p); }, quad, "int F*^p(du) dm");
  rep.rhs_g = std::pow(alpha, p - 1) * I / (p * std::pow(k, n - 1));
  rep.holds = rep.lhs_u <= rep.rhs_u && rep.lhs_g <= rep.rhs_g;
  return rep;
}

/// Positive control on reversible spaces: the same quotients evaluated over
/// (compactly supported truncations of) the bubbles must sit above the sharp
/// constants. Supports the Klein metric with its Riemannian volume density
/// and reversible Minkowski metrics with the Lebesgue measure.
struct ContrastReport {
  QuotientKind kind = QuotientKind::Hardy;
  double sharp = 0;
  std::vector<QuotientRow> rows;
  bool all_above_sharp = false;
};

inline ContrastReport reversible_contrast(const FinslerMetricSpec& spec, QuotientKind kind,
                                          const std::vector<double>& alphas, double p, double q,
                                          const QuadratureConfig& quad = {}) {
  if (kind == QuotientKind::Eigenvalue)
    throw std::invalid_argument("reversible_contrast applies to hardy/hpw/ckn quotients");
  RadialMeasure rm;
  double r_cut = quad.contrast_truncation_radius;
  if (spec.kind == FinslerMetricSpec::Kind::InterpolatedFunk && spec.a == 0.0)
    rm = klein_radial_measure(spec, r_cut);
  else if (spec.kind == FinslerMetricSpec::Kind::Minkowski && spec.norm.reversible())
    rm = minkowski_radial_measure(spec, r_cut);
  else
    throw std::invalid_argument(
        "reversible_contrast requires the Klein metric or a reversible Minkowski metric");

  // Evaluating det g through the metric near the boundary amplifies roundoff
  // by (1-|x|^2)^-1, a noise floor around 1e-7 at the default cutoff; the
  // quadrature tolerance cannot sit below it.
  QuadratureConfig cq = quad;
  cq.radial_abs_tol = std::max(cq.radial_abs_tol, 1e-7);
  cq.radial_rel_tol = std::max(cq.radial_rel_tol, 1e-7);

  ContrastReport rep;
  rep.kind = kind;
  rep.sharp = sharp_constant(kind, spec.dim, p, q);
  rep.all_above_sharp = true;
  for (double a : alphas) {
    TestFunction tf =
        kind == QuotientKind::CKN ? TestFunction::ckn(a, p, q) : TestFunction::gaussian(a);
    auto row = quotient_eval_radial(kind, rm, tf, p, q, cq, /*truncate_at=*/r_cut);
    if (!(row.quotient >= rep.sharp * (1.0 - 1e-6))) rep.all_above_sharp = false;
    rep.rows.push_back(row);
  }
  return rep;
}

/// Monte Carlo twin of the radial quotient integrals (the independent
/// cross-validation path, and the fallback for base points o != origin).
struct MonteCarloQuotient {
  QuotientRow row;
  MonteCarloResult num1, num2, den;
};

inline MonteCarloQuotient quotient_eval_montecarlo(QuotientKind kind,
                                                   const FinslerMetricSpec& spec,
                                                   const MeasureSpec& measure, const Vec& o,
                                                   const TestFunction& tf, double p, double q,
                                                   long long samples, unsigned long long seed) {
  detail::validate_quotient_params(kind, spec.dim, p, q);
  const int n = spec.dim;
  Vec lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    hi[i] = 1.0 / spec.norm(e);
    e[i] = -1.0;
    lo[i] = -1.0 / spec.norm(e);
  }
  auto inside = [&](const Vec& x) { return spec.norm(x) < 1.0; };
  auto r_of = [&](const Vec& x) { return funk_distance(spec, o, x); };
  auto dens = [&](const Vec& x) { return measure.density(x); };

  auto integral = [&](const std::function<double(double)>& f) {
    auto res = qmc_box_integral(
        inside, [&](const Vec& x) { return f(r_of(x)) * dens(x); }, lo, hi, samples, seed);
    if (res.accepted < samples / 100)
      throw std::invalid_argument("montecarlo_integral: acceptance rate below 1%");
    return res;
  };

  auto u = [&](double r) { return tf.value(r); };
  auto cg = [&](double r) { return tf.co_gradient(r); };

  MonteCarloQuotient out;
  out.row.alpha = tf.alpha;
  switch (kind) {
    case QuotientKind::Eigenvalue:
      out.num1 = integral([&](double r) { return std::pow(cg(r), p); });
      out.den = integral([&](double r) { return std::pow(std::fabs(u(r)), p); });
      out.row.quotient = out.num1.value / out.den.value;
      break;
    case QuotientKind::Hardy:
      out.num1 = integral([&](double r) { return std::pow(cg(r), p); });
      out.den = integral([&](double r) { return std::pow(std::fabs(u(r)) / r, p); });
      out.row.quotient = out.num1.value / out.den.value;
      break;
    case QuotientKind::HPW:
      out.num1 = integral([&](double r) { return cg(r) * cg(r); });
      out.num2 = integral([&](double r) { return r * r * u(r) * u(r); });
      out.den = integral([&](double r) { return u(r) * u(r); });
      out.row.quotient = out.num1.value * out.num2.value / (out.den.value * out.den.value);
      break;
    case QuotientKind::CKN:
      out.num1 = integral([&](double r) { return cg(r) * cg(r); });
      out.num2 = integral(
          [&](double r) { return std::pow(std::fabs(u(r)), 2 * p - 2) * std::pow(r, 2 - 2 * q); });
      out.den = integral([&](double r) { return std::pow(std::fabs(u(r)), p) * std::pow(r, -q); });
      out.row.quotient = out.num1.value * out.num2.value / (out.den.value * out.den.value);
      break;
  }
  out.row.num1 = out.num1.value;
  out.row.num2 = out.num2.value;
  out.row.den = out.den.value;
  return out;
}

inline QuotientRow quotient_eval(QuotientKind kind, const FinslerMetricSpec& spec,
                                 const MeasureSpec& measure, const Vec& o, const TestFunction& tf,
                                 double p, double q, const QuadratureConfig& quad) {
  if (detail::is_zero(o)) {
    auto rm = funk_radial_measure(spec, measure);
    return quotient_eval_radial(kind, rm, tf, p, q, quad);
  }
  return quotient_eval_montecarlo(kind, spec, measure, o, tf, p, q, quad.mc_samples, quad.mc_seed)
      .row;
}

/// int_0^1 g(-ln(1-s)) s^(n-1) ds, the paper-facing radial integral with the
/// angular factor intentionally omitted. Throws on non-convergence; a
/// divergent endpoint is reported through the flag.
inline IntegralResult radial_integral(const std::function<double(double)>& g, int n,
                                      const QuadratureConfig& quad = {}) {
  return radial_profile_integral(g, n, 1.0, quad);
}

}  // namespace finsler
