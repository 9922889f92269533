#pragma once

#include <cmath>
#include <utility>

namespace finsler {

/// Forward-mode dual number. Nest as Dual<Dual<double>> (and deeper) for
/// higher-order derivatives; every templated evaluation in the library is
/// written against a generic scalar so nesting works to any depth.
template <class T>
struct Dual {
  T val{};
  T dot{};

  Dual() = default;
  Dual(double v) : val(v), dot() {}  // NOLINT: implicit promotion of constants
  Dual(T v, T d) : val(std::move(v)), dot(std::move(d)) {}
};

using dual1 = Dual<double>;
using dual2 = Dual<Dual<double>>;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.val); }

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.val + b.val, a.dot + b.dot};
}
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.val - b.val, a.dot - b.dot};
}
template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.val, -a.dot}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.val * b.val, a.dot * b.val + a.val * b.dot};
}
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.val / b.val;
  return {q, (a.dot - q * b.dot) / b.val};
}

// double mixed forms (avoid promoting the constant's zero derivative chain)
template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.val + b, a.dot}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.val, b.dot}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.val - b, a.dot}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.val, -b.dot}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.val * b, a.dot * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {b.val * a, b.dot * a}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.val / b, a.dot / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) {
  T q = a / b.val;
  return {q, -q / b.val * b.dot};
}

template <class T> Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { a = a + b; return a; }
template <class T> Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) { a = a - b; return a; }
template <class T> Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) { a = a * b; return a; }

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T> Dual<T> sqrt(const Dual<T>& x) {
  T s = sqrt(x.val);
  return {s, x.dot / (2.0 * s)};
}
template <class T> Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.val);
  return {e, x.dot * e};
}
template <class T> Dual<T> log(const Dual<T>& x) { return {log(x.val), x.dot / x.val}; }
template <class T> Dual<T> sin(const Dual<T>& x) { return {sin(x.val), x.dot * cos(x.val)}; }
template <class T> Dual<T> cos(const Dual<T>& x) { return {cos(x.val), -(x.dot * sin(x.val))}; }
template <class T> Dual<T> pow(const Dual<T>& x, double e) {
  T p = pow(x.val, e);
  return {p, x.dot * (e * pow(x.val, e - 1.0))};
}

/// x^k by repeated multiplication; keeps even integer powers smooth at 0.
template <class T>
T ipow(T x, int k) {
  T r(1.0);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}

}  // namespace finsler
