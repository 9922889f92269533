#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "finsler/measure.hpp"
#include "finsler/metrics.hpp"

namespace finsler {

/// R^i_k(x,y) = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
///            - dG^i/dy^j dG^j/dy^k, every derivative by forward AD through
/// the spray coefficients.
inline Mat riemann_operator(const FinslerMetricSpec& spec, const Vec& x, const Vec& y) {
  detail::check_point(spec, x, "riemann_operator");
  if (detail::is_zero(y)) throw std::domain_error("riemann_operator: y must be nonzero");
  const int n = spec.dim;
  if (spec.kind == FinslerMetricSpec::Kind::Minkowski) return Mat(n);

  Vec G = spray_T<double>(spec, x, y);

  // first derivatives
  std::vector<Vec> dGdx(n, Vec(n, 0.0));  // dGdx[k][i] = dG^i/dx^k
  std::vector<Vec> dGdy(n, Vec(n, 0.0));
  for (int k = 0; k < n; ++k) {
    VecT<dual1> xd(n), yd(n);
    for (int i = 0; i < n; ++i) {
      xd[i] = dual1(x[i], i == k ? 1.0 : 0.0);
      yd[i] = dual1(y[i], 0.0);
    }
    auto gx = spray_T<dual1>(spec, xd, yd);
    for (int i = 0; i < n; ++i) dGdx[k][i] = gx[i].dot;

    for (int i = 0; i < n; ++i) {
      xd[i] = dual1(x[i], 0.0);
      yd[i] = dual1(y[i], i == k ? 1.0 : 0.0);
    }
    auto gy = spray_T<dual1>(spec, xd, yd);
    for (int i = 0; i < n; ++i) dGdy[k][i] = gy[i].dot;
  }

  // y^j d2G^i/dx^j dy^k and G^j d2G^i/dy^j dy^k via two-level directional seeds
  std::vector<Vec> mixed(n, Vec(n, 0.0)), second_y(n, Vec(n, 0.0));
  for (int k = 0; k < n; ++k) {
    VecT<dual2> xd(n), yd(n);
    for (int i = 0; i < n; ++i) {
      xd[i] = dual2(dual1(x[i], y[i]), dual1(0.0, 0.0));
      yd[i] = dual2(dual1(y[i], 0.0), dual1(i == k ? 1.0 : 0.0, 0.0));
    }
    auto gm = spray_T<dual2>(spec, xd, yd);
    for (int i = 0; i < n; ++i) mixed[k][i] = gm[i].dot.dot;

    for (int i = 0; i < n; ++i) {
      xd[i] = dual2(dual1(x[i], 0.0), dual1(0.0, 0.0));
      yd[i] = dual2(dual1(y[i], G[i]), dual1(i == k ? 1.0 : 0.0, 0.0));
    }
    auto gs = spray_T<dual2>(spec, xd, yd);
    for (int i = 0; i < n; ++i) second_y[k][i] = gs[i].dot.dot;
  }

  Mat R(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      double sum = 2.0 * dGdx[k][i] - mixed[k][i] + 2.0 * second_y[k][i];
      for (int j = 0; j < n; ++j) sum -= dGdy[j][i] * dGdy[k][j];
      R(i, k) = sum;
    }
  }
  return R;
}

/// K(y; v) = g_y(R_y v, v) / (F^2 g_y(v,v) - g_y(y,v)^2).
inline double flag_curvature(const FinslerMetricSpec& spec, const Vec& x, const Vec& y,
                             const Vec& v) {
  Mat g = fundamental_tensor(spec, x, y);
  double F = metric_eval(spec, x, y);
  Vec gv = matvec(g, v);
  double denom = F * F * dot(v, gv) - dot(y, gv) * dot(y, gv);
  double scale = F * F * dot(v, gv);
  if (std::fabs(denom) < 1e-14 * std::max(1.0, std::fabs(scale)))
    throw std::domain_error("flag_curvature: degenerate flag (v parallel to y)");
  Mat R = riemann_operator(spec, x, y);
  Vec Rv = matvec(R, v);
  return dot(Rv, gv) / denom;
}

/// Ricci in the 0-homogeneous normalization: the sum of the n-1 transverse
/// flag curvatures over a g_y-orthonormal basis (the flagpole term is the
/// degenerate 0/0 flag and is excluded).
inline double ricci_curvature(const FinslerMetricSpec& spec, const Vec& x, const Vec& y) {
  const int n = spec.dim;
  Mat g = fundamental_tensor(spec, x, y);
  double F = metric_eval(spec, x, y);

  // Gram-Schmidt in the g_y inner product, first basis vector y/F
  std::vector<Vec> basis;
  basis.push_back((1.0 / F) * y);
  for (int i = 0; i < n && static_cast<int>(basis.size()) < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    for (const auto& b : basis) {
      double proj = dot(e, matvec(g, b));
      e = e - proj * b;
    }
    double len = std::sqrt(dot(e, matvec(g, e)));
    if (len > 1e-10) basis.push_back((1.0 / len) * e);
  }
  if (static_cast<int>(basis.size()) != n)
    throw std::runtime_error("ricci_curvature: failed to complete a g-orthonormal basis");

  Mat R = riemann_operator(spec, x, y);
  double sum = 0;
  for (int i = 1; i < n; ++i) {
    const Vec& v = basis[i];
    Vec gv = matvec(g, v);
    double denom = F * F * dot(v, gv) - dot(y, gv) * dot(y, gv);
    sum += dot(matvec(R, v), gv) / denom;
  }
  return sum;
}

/// tau(x,y) = ln( sqrt(det g_ij(x,y)) / sigma(x) ).
inline double distortion(const FinslerMetricSpec& spec, const MeasureSpec& measure, const Vec& x,
                         const Vec& y) {
  if (detail::is_zero(y)) throw std::domain_error("distortion: y must be nonzero");
  double sigma = measure.density(x);
  if (!(sigma > 0)) throw std::invalid_argument("distortion: density must be positive");
  Mat g = fundamental_tensor(spec, x, y);
  return std::log(std::sqrt(determinant(g)) / sigma);
}

/// S(x,y) = dG^m/dy^m - y^k d(ln sigma)/dx^k (1-homogeneous in y).
inline double s_curvature(const FinslerMetricSpec& spec, const MeasureSpec& measure, const Vec& x,
                          const Vec& y) {
  detail::check_point(spec, x, "s_curvature");
  if (detail::is_zero(y)) throw std::domain_error("s_curvature: y must be nonzero");
  const int n = spec.dim;
  double trace = 0;
  if (spec.kind != FinslerMetricSpec::Kind::Minkowski) {
    for (int m = 0; m < n; ++m) {
      VecT<dual1> xd(n), yd(n);
      for (int i = 0; i < n; ++i) {
        xd[i] = dual1(x[i], 0.0);
        yd[i] = dual1(y[i], i == m ? 1.0 : 0.0);
      }
      trace += spray_T<dual1>(spec, xd, yd)[m].dot;
    }
  }
  return trace - dot(y, measure.grad_log_density(x));
}

namespace detail {

/// One RK4 state advance of the geodesic flow (signed step).
inline void geodesic_rk4_step(const FinslerMetricSpec& spec, Vec& x, Vec& v, double h) {
  auto accel = [&](const Vec& xx, const Vec& vv) {
    Vec G = spec.kind == FinslerMetricSpec::Kind::Minkowski ? Vec(spec.dim, 0.0)
                                                            : spray_T<double>(spec, xx, vv);
    return -2.0 * std::move(G);
  };
  Vec k1x = v, k1v = accel(x, v);
  Vec k2x = v + (h / 2) * k1v, k2v = accel(x + (h / 2) * k1x, v + (h / 2) * k1v);
  Vec k3x = v + (h / 2) * k2v, k3v = accel(x + (h / 2) * k2x, v + (h / 2) * k2v);
  Vec k4x = v + h * k3v, k4v = accel(x + h * k3x, v + h * k3v);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] += h / 6 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]);
    v[i] += h / 6 * (k1v[i] + 2 * k2v[i] + 2 * k3v[i] + k4v[i]);
  }
}

}  // namespace detail

/// d/dt|_0 S(gamma_y(t)) along the unit-speed geodesic through (x,y):
/// central differences along the integrated flow, Richardson-extrapolated once.
inline double s_curvature_derivative(const FinslerMetricSpec& spec, const MeasureSpec& measure,
                                     const Vec& x, const Vec& y, double h = 1e-4) {
  auto S_at = [&](double t) {
    Vec xx = x, vv = y;
    if (t != 0.0) {
      int sub = std::max(1, static_cast<int>(std::ceil(std::fabs(t) / 1e-3)));
      double step = t / sub;
      for (int i = 0; i < sub; ++i) detail::geodesic_rk4_step(spec, xx, vv, step);
    }
    return s_curvature(spec, measure, xx, vv);
  };
  double d_h = (S_at(h) - S_at(-h)) / (2 * h);
  double d_h2 = (S_at(h / 2) - S_at(-h / 2)) / h;
  return (4.0 * d_h2 - d_h) / 3.0;
}

inline constexpr double kInfiniteN = std::numeric_limits<double>::infinity();

/// Weighted Ricci Ric_N at a unit vector y:
///   Ric(y) + d/dt|_0 S(gamma'_y(t)) - S(y)^2/(N-n)   for N in (n, inf),
///   the same without the last term at N = inf, and the N -> n limit
///   (-inf whenever S(y) != 0) at N = n.
inline double weighted_ricci(const FinslerMetricSpec& spec, const MeasureSpec& measure,
                             const Vec& x, const Vec& y, double N) {
  const int n = spec.dim;
  if (N < n) throw std::invalid_argument("weighted_ricci: N must satisfy N >= dim");
  double F = metric_eval(spec, x, y);
  if (std::fabs(F - 1.0) > 1e-10)
    throw std::invalid_argument("weighted_ricci: y must be a unit vector (F(x,y) = 1)");
  double ric = ricci_curvature(spec, x, y);
  double sdot = s_curvature_derivative(spec, measure, x, y);
  double S = s_curvature(spec, measure, x, y);
  if (N == kInfiniteN) return ric + sdot;
  if (N == static_cast<double>(n))
    return std::fabs(S) > 1e-9 ? -std::numeric_limits<double>::infinity() : ric + sdot;
  return ric + sdot - S * S / (N - n);
}

/// Curvature and measure invariants at one flag (x, y, v).
struct CurvatureReport {
  double flag = 0;
  double ricci = 0;
  double distortion = 0;
  double s_curvature = 0;
  std::vector<std::pair<double, double>> weighted_ricci;  // (N, Ric_N) rows
};

inline CurvatureReport curvature_report(const FinslerMetricSpec& spec, const MeasureSpec& measure,
                                        const Vec& x, const Vec& y, const Vec& v,
                                        const std::vector<double>& Ns = {}) {
  CurvatureReport rep;
  rep.flag = flag_curvature(spec, x, y, v);
  rep.ricci = ricci_curvature(spec, x, y);
  rep.distortion = distortion(spec, measure, x, y);
  rep.s_curvature = s_curvature(spec, measure, x, y);
  if (!Ns.empty()) {
    double F = metric_eval(spec, x, y);
    Vec yu = (1.0 / F) * y;
    for (double N : Ns) rep.weighted_ricci.emplace_back(N, weighted_ricci(spec, measure, x, yu, N));
  }
  return rep;
}

}  // namespace finsler
