#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <variant>

#include "saffine/error.hpp"
#include "saffine/linalg.hpp"
#include "saffine/polygon.hpp"
#include "saffine/word.hpp"

namespace saffine {

/// Global geometric tolerance used for containment and separation margins.
inline constexpr double kDefaultTau = 1e-9;

// Normal forms. The linear part M and the translation u are fixed per case:
//   PositiveReal  M = diag(lambda, mu),           u = (1, 1)
//   MixedReal     M = diag(-lambda, mu),          u = (1, 1)
//   Jordan        M = [[nu, 1], [0, nu]],         u = (0, 1)
//   Complex       M = [[a, -b], [b, a]] (z -> kappa z), u = (1, 0)
struct PositiveReal { double lambda; double mu; bool operator==(const PositiveReal&) const = default; };
struct MixedReal { double lambda; double mu; bool operator==(const MixedReal&) const = default; };
struct Jordan { double nu; bool operator==(const Jordan&) const = default; };
struct Complex { double a; double b; bool operator==(const Complex&) const = default; };

enum class CaseKind { PositiveReal, MixedReal, Jordan, Complex };

constexpr std::string_view to_string(CaseKind k) {
  switch (k) {
    case CaseKind::PositiveReal: return "positive";
    case CaseKind::MixedReal: return "mixed";
    case CaseKind::Jordan: return "jordan";
    case CaseKind::Complex: return "complex";
  }
  return "?";
}

/// Affine map x -> linear * x + offset.
struct AffineMap {
  Mat2 linear = Mat2::identity();
  Vec2 offset{};

  static AffineMap identity() { return {}; }

  Vec2 operator()(const Vec2& v) const { return linear * v + offset; }

  /// (*this) o other
  AffineMap compose(const AffineMap& other) const {
    return {linear * other.linear, linear * other.offset + offset};
  }
  AffineMap inverse() const {
    const Mat2 inv = linear.inverse();
    return {inv, -(inv * offset)};
  }
};

/// Ellipse {center + shape * w : |w| <= radius}.
struct Ellipse {
  Vec2 center{};
  Mat2 shape = Mat2::identity();
  double radius = 0.0;
};

/// Set guaranteed to contain the attractor.
struct BoundingSet {
  std::variant<ConvexPolygon, Ellipse> region;
  bool adapted = false;  // true when built in adapted (rescaled) coordinates

  bool is_polygon() const { return std::holds_alternative<ConvexPolygon>(region); }
  const ConvexPolygon& polygon() const { return std::get<ConvexPolygon>(region); }
  const Ellipse& ellipse() const { return std::get<Ellipse>(region); }

  BoundingSet image(const AffineMap& f) const {
    if (is_polygon()) return {transform(polygon(), f.linear, f.offset), adapted};
    const Ellipse& e = ellipse();
    return {Ellipse{f(e.center), f.linear * e.shape, e.radius}, adapted};
  }

  double diameter() const {
    if (is_polygon()) return saffine::diameter(polygon());
    const Ellipse& e = ellipse();
    return 2.0 * e.radius * e.shape.norm();
  }

  double support(const Vec2& d) const {
    if (is_polygon()) return saffine::support(polygon(), d);
    const Ellipse& e = ellipse();
    return dot(e.center, d) + e.radius * (e.shape.transpose() * d).norm();
  }

  bool contains(const Vec2& p, double tol = 0.0) const {
    if (is_polygon()) return saffine::contains(polygon(), p, tol);
    const Ellipse& e = ellipse();
    const double det = e.shape.det();
    if (det == 0.0) return false;
    const Vec2 w = e.shape.inverse() * (p - e.center);
    // tol is measured in the ambient metric; |S^-1 t| <= |t| / sigma_min(S).
    return w.norm() <= e.radius + tol / std::max(e.shape.min_singular(), 1e-300);
  }

  /// Radius of the smallest origin-centred disc containing the set.
  double max_norm() const {
    if (is_polygon()) {
      double r = 0.0;
      for (const auto& v : polygon().vertices) r = std::max(r, v.norm());
      return r + polygon().slack;
    }
    const Ellipse& e = ellipse();
    return e.center.norm() + e.radius * e.shape.norm();
  }
};

class SystemSpec {
 public:
  using Case = std::variant<PositiveReal, MixedReal, Jordan, Complex>;

  /// Validates the normal-form invariants (contraction, non-degeneracy).
  explicit SystemSpec(Case c, double tau = kDefaultTau) : case_(c) { validate(tau); }

  static SystemSpec positive_real(double lambda, double mu) { return SystemSpec(PositiveReal{lambda, mu}); }
  static SystemSpec mixed_real(double lambda, double mu) { return SystemSpec(MixedReal{lambda, mu}); }
  static SystemSpec jordan(double nu) { return SystemSpec(Jordan{nu}); }
  static SystemSpec complex(double a, double b) { return SystemSpec(Complex{a, b}); }
  static SystemSpec complex(std::complex<double> kappa) { return complex(kappa.real(), kappa.imag()); }

  const Case& params() const { return case_; }
  CaseKind kind() const { return static_cast<CaseKind>(case_.index()); }
  template <class T> bool is() const { return std::holds_alternative<T>(case_); }
  template <class T> const T& as() const { return std::get<T>(case_); }

  Mat2 linear() const {
    return std::visit(
        [](const auto& c) -> Mat2 {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PositiveReal>) return Mat2::diag(c.lambda, c.mu);
          else if constexpr (std::is_same_v<T, MixedReal>) return Mat2::diag(-c.lambda, c.mu);
          else if constexpr (std::is_same_v<T, Jordan>) return {c.nu, 1.0, 0.0, c.nu};
          else return {c.a, -c.b, c.b, c.a};
        },
        case_);
  }

  Vec2 translation() const {
    switch (kind()) {
      case CaseKind::PositiveReal:
      case CaseKind::MixedReal: return {1.0, 1.0};
      case CaseKind::Jordan: return {0.0, 1.0};
      case CaseKind::Complex: return {1.0, 0.0};
    }
    return {};
  }

  /// T_m or T_p.
  AffineMap map(Digit d) const { return {linear(), translation() * value(d)}; }

  /// Largest eigenvalue modulus.
  double spectral_radius() const {
    return std::visit(
        [](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PositiveReal> || std::is_same_v<T, MixedReal>)
            return std::max(c.lambda, c.mu);
          else if constexpr (std::is_same_v<T, Jordan>) return c.nu;
          else return std::hypot(c.a, c.b);
        },
        case_);
  }

  /// Smallest eigenvalue modulus.
  double min_modulus() const {
    return std::visit(
        [](const auto& c) -> double {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PositiveReal> || std::is_same_v<T, MixedReal>)
            return std::min(c.lambda, c.mu);
          else if constexpr (std::is_same_v<T, Jordan>) return c.nu;
          else return std::hypot(c.a, c.b);
        },
        case_);
  }

  std::complex<double> kappa() const {
    const auto& c = as<Complex>();
    return {c.a, c.b};
  }

  std::string describe() const;

  bool operator==(const SystemSpec& o) const { return case_ == o.case_; }

 private:
  void validate(double tau) const;
  Case case_;
};

inline void SystemSpec::validate(double tau) const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PositiveReal> || std::is_same_v<T, MixedReal>) {
          if (!std::isfinite(c.lambda) || !std::isfinite(c.mu))
            throw Error(ErrorKind::InvalidArgument, "non-finite parameter");
          if (std::abs(c.lambda) <= tau || std::abs(c.mu) <= tau)
            throw Error(ErrorKind::Degenerate, "zero eigenvalue");
          if (!in_unit(c.lambda) || !in_unit(c.mu))
            throw Error(ErrorKind::NotContracting, "eigenvalues must lie in (0, 1)");
          if constexpr (std::is_same_v<T, PositiveReal>) {
            if (std::abs(c.lambda - c.mu) <= tau)
              throw Error(ErrorKind::Degenerate, "equal eigenvalues in the positive real case");
          }
        } else if constexpr (std::is_same_v<T, Jordan>) {
          if (!std::isfinite(c.nu)) throw Error(ErrorKind::InvalidArgument, "non-finite parameter");
          if (std::abs(c.nu) <= tau) throw Error(ErrorKind::Degenerate, "zero eigenvalue");
          if (!in_unit(c.nu)) throw Error(ErrorKind::NotContracting, "nu must lie in (0, 1)");
        } else {
          if (!std::isfinite(c.a) || !std::isfinite(c.b))
            throw Error(ErrorKind::InvalidArgument, "non-finite parameter");
          if (std::abs(c.b) <= tau) throw Error(ErrorKind::Degenerate, "real kappa (b = 0)");
          const double r2 = c.a * c.a + c.b * c.b;
          if (!(r2 < 1.0)) throw Error(ErrorKind::NotContracting, "|kappa| must be < 1");
        }
      },
      case_);
}

inline std::string SystemSpec::describe() const {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PositiveReal>)
          return "PositiveReal(" + std::to_string(c.lambda) + ", " + std::to_string(c.mu) + ")";
        else if constexpr (std::is_same_v<T, MixedReal>)
          return "MixedReal(" + std::to_string(c.lambda) + ", " + std::to_string(c.mu) + ")";
        else if constexpr (std::is_same_v<T, Jordan>)
          return "Jordan(" + std::to_string(c.nu) + ")";
        else
          return "Complex(" + std::to_string(c.a) + ", " + std::to_string(c.b) + ")";
      },
      case_);
}

// ---------------------------------------------------------------------------
// Normal form detection

/// Reduces (matrix, u) to its normal form. Conjugation does not change the
/// properties studied here, so only the eigenvalue data survive. A negative
/// Jordan eigenvalue or two negative real eigenvalues are folded onto the
/// positive case through the alternating-digit symmetry a_i -> (-1)^i a_i.
inline SystemSpec normalize_system(const Mat2& m, const Vec2& u, double tau = kDefaultTau) {
  if (u.norm() <= tau) throw Error(ErrorKind::Degenerate, "translation vector is zero");
  const double tr = m.trace();
  const double det = m.det();
  const double disc = tr * tr - 4.0 * det;
  const Vec2 mu_vec = m * u;

  if (disc < -tau) {
    const double a = 0.5 * tr;
    const double b = 0.5 * std::sqrt(-disc);
    if (std::sqrt(det) >= 1.0) throw Error(ErrorKind::NotContracting, "spectral radius >= 1");
    return SystemSpec(Complex{a, b}, tau);
  }

  if (std::abs(disc) <= tau) {
    const double nu = 0.5 * tr;
    if (std::abs(nu) >= 1.0) throw Error(ErrorKind::NotContracting, "spectral radius >= 1");
    if (std::abs(nu) <= tau) throw Error(ErrorKind::Degenerate, "zero eigenvalue");
    const Mat2 nil = m - Mat2::identity() * nu;
    if (nil.max_abs() <= std::sqrt(tau))
      throw Error(ErrorKind::Degenerate, "equal eigenvalues with a diagonalizable matrix");
    if ((nil * u).norm() <= tau * u.norm())
      throw Error(ErrorKind::Degenerate, "translation is an eigenvector (not cyclic)");
    return SystemSpec(Jordan{std::abs(nu)}, tau);
  }

  const double root = std::sqrt(disc);
  // Numerically stable quadratic roots.
  const double q = -0.5 * (tr + std::copysign(root, tr));
  double e1 = q != 0.0 ? -q : 0.0;
  double e2 = q != 0.0 ? -det / q : 0.0;
  if (q == 0.0) { e1 = 0.5 * root; e2 = -0.5 * root; }
  if (std::max(std::abs(e1), std::abs(e2)) >= 1.0) throw Error(ErrorKind::NotContracting, "spectral radius >= 1");
  if (std::min(std::abs(e1), std::abs(e2)) <= tau) throw Error(ErrorKind::Degenerate, "zero eigenvalue");
  if (std::abs(cross(u, mu_vec)) <= tau * u.norm() * std::max(mu_vec.norm(), 1.0))
    throw Error(ErrorKind::Degenerate, "translation is not a cyclic vector");

  if ((e1 > 0.0) == (e2 > 0.0)) {
    const double lo = std::min(std::abs(e1), std::abs(e2));
    const double hi = std::max(std::abs(e1), std::abs(e2));
    return SystemSpec(PositiveReal{lo, hi}, tau);
  }
  const double neg = e1 < 0.0 ? e1 : e2;
  const double pos = e1 < 0.0 ? e2 : e1;
  return SystemSpec(MixedReal{-neg, pos}, tau);
}

// ---------------------------------------------------------------------------
// Projection

namespace detail {

/// Forward-mode dual number for the derivative of the digit series.
struct Dual {
  double v = 0.0;
  double d = 0.0;
  Dual() = default;
  Dual(double value, double deriv = 0.0) : v(value), d(deriv) {}
  Dual operator+(const Dual& o) const { return {v + o.v, d + o.d}; }
  Dual operator-(const Dual& o) const { return {v - o.v, d - o.d}; }
  Dual operator*(const Dual& o) const { return {v * o.v, d * o.v + v * o.d}; }
  Dual operator/(const Dual& o) const { return {v / o.v, (d * o.v - v * o.d) / (o.v * o.v)}; }
};

/// Sum over i of a_i y^i for an eventually periodic address, in closed form:
/// A(y) + y^P C(y) / (1 - y^Q).
template <class T>
T digit_series(const EventualAddress& addr, T y) {
  T sum(0.0), pw(1.0);
  for (Digit d : addr.preperiod) {
    sum = sum + pw * T(static_cast<double>(value(d)));
    pw = pw * y;
  }
  T cyc(0.0), cpw(1.0);
  for (Digit d : addr.period) {
    cyc = cyc + cpw * T(static_cast<double>(value(d)));
    cpw = cpw * y;
  }
  return sum + pw * cyc / (T(1.0) - cpw);
}

}  // namespace detail

/// Affine map of a finite word, T_{w_0} o ... o T_{w_{k-1}}, so that
/// pi(w t) = affine_of_word(w)(pi(t)).
inline AffineMap affine_of_word(const SystemSpec& spec, const Word& w) {
  const Mat2 m = spec.linear();
  const Vec2 u = spec.translation();
  AffineMap f;
  for (Digit d : w) {
    f.offset += f.linear * (u * value(d));
    f.linear = f.linear * m;
  }
  return f;
}

/// Exact projection of an eventually periodic address.
inline Vec2 project(const SystemSpec& spec, const EventualAddress& addr) {
  return std::visit(
      [&](const auto& c) -> Vec2 {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PositiveReal>) {
          return {detail::digit_series(addr, c.lambda), detail::digit_series(addr, c.mu)};
        } else if constexpr (std::is_same_v<T, MixedReal>) {
          return {detail::digit_series(addr, -c.lambda), detail::digit_series(addr, c.mu)};
        } else if constexpr (std::is_same_v<T, Jordan>) {
          const detail::Dual s = detail::digit_series(addr, detail::Dual(c.nu, 1.0));
          return {s.d, s.v};
        } else {
          const auto z = detail::digit_series(addr, std::complex<double>(c.a, c.b));
          return {z.real(), z.imag()};
        }
      },
      spec.params());
}

/// Containing set for the attractor. Real diagonal cases get the coordinatewise
/// box, the complex case the disc of radius 1/(1 - |kappa|), and the Jordan case
/// a disc in coordinates where the off-diagonal entry is eps = (1 - nu) / 2.
inline BoundingSet bounding_set(const SystemSpec& spec) {
  return std::visit(
      [](const auto& c) -> BoundingSet {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PositiveReal> || std::is_same_v<T, MixedReal>) {
          const double x = 1.0 / (1.0 - c.lambda), y = 1.0 / (1.0 - c.mu);
          ConvexPolygon box;
          box.vertices = {{-x, -y}, {x, -y}, {x, y}, {-x, y}};
          return {box, false};
        } else if constexpr (std::is_same_v<T, Jordan>) {
          // D = diag(1, eps): D^-1 M D = [[nu, eps], [0, nu]] has norm <= nu + eps,
          // and D^-1 u = (0, 1/eps).
          const double eps = 0.5 * (1.0 - c.nu);
          const double contraction = c.nu + eps;
          if (!(contraction < 1.0)) throw Error(ErrorKind::NotContracting, "no adapted norm below 1");
          const double radius = (1.0 / eps) / (1.0 - contraction);
          return {Ellipse{{0.0, 0.0}, Mat2::diag(1.0, eps), radius}, true};
        } else {
          const double r = std::hypot(c.a, c.b);
          return {Ellipse{{0.0, 0.0}, Mat2::identity(), 1.0 / (1.0 - r)}, false};
        }
      },
      spec.params());
}

struct PrefixProjection {
  Vec2 point;
  double error_radius;
};

/// point = affine_of_word(w)(0); every address starting with w projects within
/// error_radius of point.
inline PrefixProjection project_prefix(const SystemSpec& spec, const Word& w) {
  const AffineMap f = affine_of_word(spec, w);
  const BoundingSet k = bounding_set(spec);
  return {f(Vec2{0.0, 0.0}), k.image(f).diameter()};
}

/// Upper bound on ||M^k|| (spectral norm), computed directly.
inline double power_norm(const SystemSpec& spec, int k) { return power(spec.linear(), k).norm(); }

}  // namespace saffine
