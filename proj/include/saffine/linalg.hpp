#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>

namespace saffine {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
  return os << "(" << v.x << ", " << v.y << ")";
}

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct Mat2 {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  constexpr Mat2() = default;
  constexpr Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 diag(double p, double q) { return {p, 0.0, 0.0, q}; }

  constexpr Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  constexpr Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  constexpr Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  constexpr Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  constexpr Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  constexpr bool operator==(const Mat2&) const = default;

  constexpr double det() const { return a * d - b * c; }
  constexpr double trace() const { return a + d; }
  constexpr Mat2 transpose() const { return {a, c, b, d}; }
  constexpr Mat2 inverse() const {
    const double k = 1.0 / det();
    return {d * k, -b * k, -c * k, a * k};
  }
  double max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }

  /// Singular values (largest first), closed form for 2x2.
  void singular_values(double& s_max, double& s_min) const {
    const double e = (a + d) * 0.5, f = (a - d) * 0.5;
    const double g = (c + b) * 0.5, h = (c - b) * 0.5;
    const double q = std::hypot(e, h), r = std::hypot(f, g);
    s_max = q + r;
    s_min = std::abs(q - r);
  }
  double norm() const {
    double hi, lo;
    singular_values(hi, lo);
    return hi;
  }
  double min_singular() const {
    double hi, lo;
    singular_values(hi, lo);
    return lo;
  }
};

inline Mat2 power(Mat2 m, int k) {
  Mat2 result = Mat2::identity();
  while (k > 0) {
    if (k & 1) result = result * m;
    m = m * m;
    k >>= 1;
  }
  return result;
}

}  // namespace saffine
