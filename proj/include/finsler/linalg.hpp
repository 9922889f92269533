#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "finsler/dual.hpp"

namespace finsler {

using Vec = std::vector<double>;

template <class T>
using VecT = std::vector<T>;

/// Dense square matrix with generic scalar, row-major.
template <class T>
struct MatT {
  int n = 0;
  std::vector<T> a;

  MatT() = default;
  explicit MatT(int dim) : n(dim), a(static_cast<size_t>(dim) * dim, T(0.0)) {}

  T& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

using Mat = MatT<double>;

template <class T>
T dot(const VecT<T>& a, const VecT<T>& b) {
  T s(0.0);
  for (size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(Vec a, const Vec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}
inline Vec operator-(Vec a, const Vec& b) {
  for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}
inline Vec operator*(double s, Vec a) {
  for (auto& x : a) x *= s;
  return a;
}
inline Vec operator-(Vec a) {
  for (auto& x : a) x = -x;
  return a;
}

inline Vec normalized(Vec a) {
  double n = norm2(a);
  if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
  return (1.0 / n) * std::move(a);
}

/// Solve A x = b by Gaussian elimination with partial pivoting; pivot choice
/// looks only at the primal values so the routine works for dual scalars.
template <class T>
VecT<T> solve_linear(MatT<T> A, VecT<T> b) {
  const int n = A.n;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(value_of(A(k, k)));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(value_of(A(i, k)));
      if (v > best) { best = v; piv = i; }
    }
    if (best == 0.0) throw std::runtime_error("singular matrix in solve_linear");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      T f = A(i, k) / A(k, k);
      for (int j = k; j < n; ++j) A(i, j) = A(i, j) - f * A(k, j);
      b[i] = b[i] - f * b[k];
    }
  }
  VecT<T> x(n, T(0.0));
  for (int i = n - 1; i >= 0; --i) {
    T s = b[i];
    for (int j = i + 1; j < n; ++j) s = s - A(i, j) * x[j];
    x[i] = s / A(i, i);
  }
  return x;
}

/// Determinant by LU with partial pivoting (primal-value pivoting).
template <class T>
T determinant(MatT<T> A) {
  const int n = A.n;
  T det(1.0);
  int sign = 1;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::fabs(value_of(A(k, k)));
    for (int i = k + 1; i < n; ++i) {
      double v = std::fabs(value_of(A(i, k)));
      if (v > best) { best = v; piv = i; }
    }
    if (best == 0.0) return T(0.0);
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      T f = A(i, k) / A(k, k);
      for (int j = k; j < n; ++j) A(i, j) = A(i, j) - f * A(k, j);
    }
    det = det * A(k, k);
  }
  return sign > 0 ? det : -det;
}

/// Cholesky SPD probe: returns false if some pivot is below tol * scale.
inline bool is_spd(const Mat& A, double tol = 1e-12) {
  const int n = A.n;
  Mat L(n);
  double scale = 0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::fabs(A(i, i)));
  for (int j = 0; j < n; ++j) {
    double d = A(j, j);
    for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d <= tol * scale) return false;
    L(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = A(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / L(j, j);
    }
  }
  return true;
}

inline Vec matvec(const Mat& A, const Vec& x) {
  Vec y(A.n, 0.0);
  for (int i = 0; i < A.n; ++i) {
    double s = 0;
    for (int j = 0; j < A.n; ++j) s += A(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

}  // namespace finsler
