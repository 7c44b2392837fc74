#pragma once

#include <cmath>

namespace parageo {

// Forward-mode scalar with one derivative slot. D<double> carries a value
// and one directional derivative; D<D<double>> nests a second independent
// direction, so its .b.b member is the mixed second partial.
template <class T>
struct D {
  T a{};  // value
  T b{};  // derivative along the seeded direction

  D() = default;
  D(double v) : a(v), b() {}
  D(T av, T bv) : a(av), b(bv) {}

  friend D operator+(const D& x, const D& y) { return {x.a + y.a, x.b + y.b}; }
  friend D operator-(const D& x, const D& y) { return {x.a - y.a, x.b - y.b}; }
  friend D operator-(const D& x) { return {-x.a, -x.b}; }
  friend D operator*(const D& x, const D& y) {
    return {x.a * y.a, x.a * y.b + x.b * y.a};
  }
  friend D operator/(const D& x, const D& y) {
    return {x.a / y.a, (x.b * y.a - x.a * y.b) / (y.a * y.a)};
  }
};

using Dual = D<double>;
using Dual2 = D<Dual>;

template <class T>
D<T> sin(const D<T>& x) {
  using std::cos;
  using std::sin;
  return {sin(x.a), cos(x.a) * x.b};
}

template <class T>
D<T> cos(const D<T>& x) {
  using std::cos;
  using std::sin;
  return {cos(x.a), -(sin(x.a) * x.b)};
}

template <class T>
D<T> exp(const D<T>& x) {
  using std::exp;
  T e = exp(x.a);
  return {e, e * x.b};
}

template <class T>
D<T> log(const D<T>& x) {
  using std::log;
  return {log(x.a), x.b / x.a};
}

// Power with a constant exponent uses the power rule directly, which keeps
// negative bases valid for integer exponents.
template <class T>
D<T> pow(const D<T>& x, double c) {
  using std::pow;
  if (c == 0.0) return D<T>(1.0);
  if (c == 1.0) return x;
  return {pow(x.a, c), (pow(x.a, c - 1.0) * x.b) * c};
}

template <class T>
D<T> pow(const D<T>& x, const D<T>& y) {
  return exp(y * log(x));
}

template <class T>
D<T> operator*(const D<T>& x, double s) {
  return {x.a * s, x.b * s};
}

template <class T>
D<T> operator*(double s, const D<T>& x) {
  return x * s;
}

}  // namespace parageo
