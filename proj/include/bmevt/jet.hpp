#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace bmevt {

/// Second-order forward-mode number in N variables: carries the value, the
/// gradient and the Hessian through arithmetic. Used to differentiate the
/// scalar-templated GEV log-density exactly.
template <int N>
struct Jet {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;

  double v = 0.0;
  Vec g = Vec::Zero();
  Mat h = Mat::Zero();

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

  static Jet variable(double value, int index) {
    Jet j(value);
    j.g[index] = 1.0;
    return j;
  }

  /// Chain rule for a unary function with derivatives d1, d2 at v.
  [[nodiscard]] Jet apply(double fv, double d1, double d2) const {
    Jet r(fv);
    r.g = d1 * g;
    r.h = d1 * h + d2 * g * g.transpose();
    return r;
  }

  Jet& operator+=(const Jet& o) { v += o.v; g += o.g; h += o.h; return *this; }
  Jet& operator-=(const Jet& o) { v -= o.v; g -= o.g; h -= o.h; return *this; }
  Jet& operator*=(const Jet& o) {
    Jet r(v * o.v);
    r.g = o.v * g + v * o.g;
    r.h = o.v * h + v * o.h + g * o.g.transpose() + o.g * g.transpose();
    return *this = r;
  }
  Jet& operator/=(const Jet& o) { return *this *= o.apply(1.0 / o.v, -1.0 / (o.v * o.v), 2.0 / (o.v * o.v * o.v)); }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }
  friend Jet operator-(const Jet& a) { return a.apply(-a.v, -1.0, 0.0); }

  friend Jet exp(const Jet& a) { const double e = std::exp(a.v); return a.apply(e, e, e); }
  friend Jet expm1(const Jet& a) { const double e = std::exp(a.v); return a.apply(std::expm1(a.v), e, e); }
  friend Jet log(const Jet& a) { return a.apply(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
  friend Jet log1p(const Jet& a) {
    const double d = 1.0 + a.v;
    return a.apply(std::log1p(a.v), 1.0 / d, -1.0 / (d * d));
  }
};

inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) { return x.v; }

}  // namespace bmevt
