#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "finsler/dual.hpp"
#include "finsler/linalg.hpp"
#include "finsler/sphere_search.hpp"

namespace finsler {

/// A strongly convex Minkowski norm on coordinate n-space. Immutable after
/// construction; all evaluations are pure and generic in the scalar type so
/// dual numbers flow through for derivatives.
///
/// Kinds:
///   Euclidean      |y|
///   PowerSum2m     (sum_i y_i^(2m))^(1/(2m)), reversible
///   QuarticSplit   sqrt(sqrt(|u|^4 + |v|^4) + |u|^2 + |v|^2) on R^n1 x R^n2
///   Ellipsoid      sqrt(sum (y_i/a_i)^2)
///   Randers        |y| + <b,y> with |b| < 1 (the irreversible extension point)
struct MinkowskiNorm {
  enum class Kind { Euclidean, PowerSum2m, QuarticSplit, Ellipsoid, Randers };

  Kind kind = Kind::Euclidean;
  int dim = 0;
  int m = 2;              // PowerSum2m exponent parameter
  int split = 1;          // QuarticSplit: first block size n1 (n2 = dim - n1)
  Vec axes;               // Ellipsoid semi-axes
  Vec drift;              // Randers drift vector b

  static MinkowskiNorm euclidean(int n) { return {Kind::Euclidean, n, 2, 1, {}, {}}; }
  static MinkowskiNorm power_sum(int n, int m) { return {Kind::PowerSum2m, n, m, 1, {}, {}}; }
  static MinkowskiNorm quartic_split(int n1, int n2) {
    return {Kind::QuarticSplit, n1 + n2, 2, n1, {}, {}};
  }
  static MinkowskiNorm ellipsoid(Vec semi_axes) {
    MinkowskiNorm nm{Kind::Ellipsoid, static_cast<int>(semi_axes.size()), 2, 1,
                     std::move(semi_axes), {}};
    for (double a : nm.axes)
      if (!(a > 0)) throw std::invalid_argument("ellipsoid axes must be positive");
    return nm;
  }
  static MinkowskiNorm randers(Vec b) {
    MinkowskiNorm nm{Kind::Randers, static_cast<int>(b.size()), 2, 1, {}, std::move(b)};
    if (norm2(nm.drift) >= 1.0)
      throw std::invalid_argument("randers drift must satisfy |b| < 1");
    return nm;
  }

  bool reversible() const { return kind != Kind::Randers; }

  template <class T>
  T operator()(const VecT<T>& y) const {
    switch (kind) {
      case Kind::Euclidean: {
        T s(0.0);
        for (const auto& v : y) s = s + v * v;
        return sqrt(s);
      }
      case Kind::PowerSum2m: {
        T s(0.0);
        for (const auto& v : y) s = s + ipow(v, 2 * m);
        return pow(s, 1.0 / (2.0 * m));
      }
      case Kind::QuarticSplit: {
        T a(0.0), b(0.0);
        for (int i = 0; i < split; ++i) a = a + y[i] * y[i];
        for (int i = split; i < dim; ++i) b = b + y[i] * y[i];
        return sqrt(sqrt(a * a + b * b) + a + b);
      }
      case Kind::Ellipsoid: {
        T s(0.0);
        for (int i = 0; i < dim; ++i) {
          T v = y[i] / axes[i];
          s = s + v * v;
        }
        return sqrt(s);
      }
      case Kind::Randers: {
        T s(0.0), lin(0.0);
        for (int i = 0; i < dim; ++i) {
          s = s + y[i] * y[i];
          lin = lin + drift[i] * y[i];
        }
        return sqrt(s) + lin;
      }
    }
    throw std::logic_error("unknown norm kind");
  }

  std::string describe() const {
    switch (kind) {
      case Kind::Euclidean: return "euclidean";
      case Kind::PowerSum2m: return "power-sum-2m(m=" + std::to_string(m) + ")";
      case Kind::QuarticSplit:
        return "quartic-split(" + std::to_string(split) + "," + std::to_string(dim - split) + ")";
      case Kind::Ellipsoid: return "ellipsoid";
      case Kind::Randers: return "randers";
    }
    return "?";
  }
};

namespace detail {
inline void check_dim(const MinkowskiNorm& norm, const Vec& y, const char* what) {
  if (static_cast<int>(y.size()) != norm.dim)
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(norm.dim) + ", got " + std::to_string(y.size()));
}
inline bool is_zero(const Vec& y) {
  for (double v : y)
    if (v != 0.0) return false;
  return true;
}
}  // namespace detail

inline double eval_norm(const MinkowskiNorm& norm, const Vec& y) {
  detail::check_dim(norm, y, "eval_norm");
  if (detail::is_zero(y)) return 0.0;
  return norm(y);
}

/// phi*(xi) = sup_{phi(y)=1} <y,xi>. Closed Hoelder/quadratic conjugates where
/// they exist; otherwise multi-start projected ascent over the unit sphere
/// (2n axis starts plus 64 low-discrepancy starts).
inline double dual_norm(const MinkowskiNorm& norm, const Vec& xi) {
  detail::check_dim(norm, xi, "dual_norm");
  if (detail::is_zero(xi)) return 0.0;
  switch (norm.kind) {
    case MinkowskiNorm::Kind::Euclidean:
      return norm2(xi);
    case MinkowskiNorm::Kind::PowerSum2m: {
      double q = 2.0 * norm.m / (2.0 * norm.m - 1.0);
      double s = 0;
      for (double v : xi) s += std::pow(std::fabs(v), q);
      return std::pow(s, 1.0 / q);
    }
    case MinkowskiNorm::Kind::Ellipsoid: {
      double s = 0;
      for (int i = 0; i < norm.dim; ++i) s += (norm.axes[i] * xi[i]) * (norm.axes[i] * xi[i]);
      return std::sqrt(s);
    }
    case MinkowskiNorm::Kind::Randers: {
      double b2 = dot(norm.drift, norm.drift);
      double bx = dot(norm.drift, xi);
      double disc = bx * bx + dot(xi, xi) * (1.0 - b2);
      return (std::sqrt(disc) - bx) / (1.0 - b2);
    }
    case MinkowskiNorm::Kind::QuarticSplit:
      break;  // generic path below
  }
  auto objective = [&](const Vec& u) { return dot(u, xi) / norm(u); };
  std::vector<Vec> starts;
  for (int i = 0; i < norm.dim; ++i) {
    Vec e(norm.dim, 0.0);
    e[i] = 1.0;
    starts.push_back(e);
    e[i] = -1.0;
    starts.push_back(e);
  }
  auto res = maximize_over_sphere(objective, norm.dim, 64, 2, 1e-10, 400, starts);
  if (!res.converged && res.gradient_residual > 1e-6 * std::max(1.0, std::fabs(res.value)))
    throw std::runtime_error("dual_norm: maximization stalled, gradient residual " +
                             std::to_string(res.gradient_residual));
  return res.value;
}

/// Legendre transform L(y) = g_y(y, .) = grad of phi^2/2, with L(0) = 0.
inline Vec legendre_transform(const MinkowskiNorm& norm, const Vec& y) {
  detail::check_dim(norm, y, "legendre_transform");
  Vec out(norm.dim, 0.0);
  if (detail::is_zero(y)) return out;
  for (int j = 0; j < norm.dim; ++j) {
    VecT<dual1> yd(norm.dim);
    for (int i = 0; i < norm.dim; ++i) yd[i] = dual1(y[i], i == j ? 1.0 : 0.0);
    dual1 phi = norm(yd);
    out[j] = (phi * phi).dot * 0.5;
  }
  return out;
}

/// lambda_phi = sup_{y != 0} phi(-y)/phi(y), by low-discrepancy scan plus
/// local refinement.
inline double norm_reversibility(const MinkowskiNorm& norm, int budget = 4096) {
  auto ratio = [&](const Vec& u) { return norm(-u) / norm(u); };
  auto res = maximize_over_sphere(ratio, norm.dim, budget, 4);
  return std::max(res.value, 1.0);
}

/// Hessian of phi^2/2 at y (the norm-level fundamental tensor g_ij(y)),
/// by nested forward AD.
inline Mat norm_fundamental_tensor(const MinkowskiNorm& norm, const Vec& y) {
  detail::check_dim(norm, y, "norm_fundamental_tensor");
  if (detail::is_zero(y)) throw std::domain_error("fundamental tensor undefined at y = 0");
  const int n = norm.dim;
  Mat g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      VecT<dual2> yd(n);
      for (int k = 0; k < n; ++k) {
        yd[k] = dual2(dual1(y[k], k == i ? 1.0 : 0.0), dual1(k == j ? 1.0 : 0.0, 0.0));
      }
      dual2 phi = norm(yd);
      dual2 h = phi * phi * 0.5;
      g(i, j) = g(j, i) = h.dot.dot;
    }
  }
  return g;
}

/// The open convex body Omega = {phi < 1}; boundary is the unit level set.
struct ConvexDomain {
  MinkowskiNorm norm;

  int dim() const { return norm.dim; }
  bool contains(const Vec& x) const { return detail::is_zero(x) || norm(x) < 1.0; }
  double gauge(const Vec& x) const { return detail::is_zero(x) ? 0.0 : norm(x); }

  /// Smallest t > t_min with phi(x + t d) = 1 (safeguarded Newton/bisection).
  double boundary_ray_parameter(const Vec& x, const Vec& d, double t_min = 0.0) const {
    auto phi_at = [&](double t) {
      Vec p(x.size());
      for (size_t i = 0; i < x.size(); ++i) p[i] = x[i] + t * d[i];
      return gauge(p);
    };
    double lo = t_min, hi = std::max(1.0, 2.0 * t_min + 1.0);
    int guard = 0;
    while (phi_at(hi) < 1.0) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 200) throw std::runtime_error("boundary ray bracket failed to close");
    }
    // Newton on phi(x + t d) - 1 with bisection fallback
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      Vec p(x.size());
      VecT<dual1> pd(x.size());
      for (size_t i = 0; i < x.size(); ++i) pd[i] = dual1(x[i] + t * d[i], d[i]);
      dual1 ph = norm(pd);
      double res = ph.val - 1.0;
      if (std::fabs(res) < 1e-14) return t;
      if (res > 0)
        hi = t;
      else
        lo = t;
      double step = res / ph.dot;
      double tn = t - step;
      t = (tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
    }
    return t;
  }
};

}  // namespace finsler
