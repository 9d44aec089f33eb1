#pragma once

// Convex hulls of attractors.
//
// Closed forms exist for the mixed real, Jordan, rational-angle complex and
// equal-modulus mixed cases. Everything else goes through support-direction
// sampling: for a unit direction d the digits a_j = sign <M^j u, d> maximize
// <pi(a), d>, so the sampled extreme points give an inner polygon and the
// exact support values give an outer one. The returned polygon is the inner one
// with slack large enough to cover the outer.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "saffine/error.hpp"
#include "saffine/polygon.hpp"
#include "saffine/system.hpp"

namespace saffine {

/// Polygon together with an address generating each vertex.
struct AddressedHull {
  ConvexPolygon polygon;
  std::vector<EventualAddress> addresses;  // parallel to polygon.vertices
};

struct ExtremeSequence {
  double phi = 0.0;
  Word digits;
  std::vector<std::size_t> tie_positions;
};

namespace detail {

/// Default truncation: 1e-6 of the bounding-set diameter.
inline double default_hull_eps(const SystemSpec& spec) { return 1e-6 * bounding_set(spec).diameter(); }

/// (a_i (-1)^i)_i as an eventual address.
inline EventualAddress alternate(const EventualAddress& a) {
  const std::size_t p = a.preperiod.size();
  const std::size_t q = a.period.size() % 2 == 0 ? a.period.size() : 2 * a.period.size();
  Word pre, per;
  auto alt = [&](std::size_t i) { return i % 2 == 1 ? flip(a.at(i)) : a.at(i); };
  for (std::size_t i = 0; i < p; ++i) pre.push_back(alt(i));
  for (std::size_t i = 0; i < q; ++i) per.push_back(alt(p + i));
  return {pre, per};
}

struct Candidate {
  Vec2 point;
  EventualAddress address;
};

/// Hull of candidate points with addresses carried along. Points dropped as
/// near-collinear within tol add tol to the slack.
inline AddressedHull hull_with_addresses(const std::vector<Candidate>& cands, double tol, double slack, bool closed) {
  std::vector<Vec2> pts;
  pts.reserve(cands.size());
  for (const auto& c : cands) pts.push_back(c.point);
  AddressedHull out;
  out.polygon = convex_hull(pts, tol);
  out.polygon.closed = closed;
  out.polygon.slack = slack + tol;
  for (const auto& v : out.polygon.vertices) {
    for (const auto& c : cands)
      if (c.point == v) {
        out.addresses.push_back(c.address);
        break;
      }
  }
  return out;
}

/// Family f(k), k = 0, 1, ..., with limit point `limit`; stops once consecutive
/// vertices are closer than eps. Returns the tail bound: every omitted vertex is
/// within that distance of the limit, which is itself emitted.
template <class F>
double push_family(std::vector<Candidate>& out, F&& f, const EventualAddress& limit_addr, const Vec2& limit, double eps,
                   std::size_t max_k = 100000) {
  Candidate prev = f(0);
  out.push_back(prev);
  double tail = 0.0;
  for (std::size_t k = 1; k < max_k; ++k) {
    Candidate cur = f(k);
    const double step = distance(cur.point, prev.point);
    out.push_back(cur);
    if (step < eps) {
      // remaining vertices shrink geometrically toward the limit; scan ahead past
      // any transient growth of ||M^j||
      for (std::size_t j = k; j < k + 200; ++j) tail = std::max(tail, distance(f(j).point, limit));
      break;
    }
    prev = std::move(cur);
  }
  out.push_back({limit, limit_addr});
  return tail;
}

}  // namespace detail

/// Mixed real case, 0 < lambda < mu < 1. Vertices pi((pm)^k p^inf), pi((mp)^k p^inf),
/// pi((pm)^k m^inf), pi((mp)^k m^inf), accumulating at pi((pm)^inf) and pi((mp)^inf).
inline AddressedHull hull_mixed_real_addressed(double lambda, double mu, double eps = -1.0) {
  if (lambda == mu) throw Error(ErrorKind::DegenerateParameters, "lambda = mu: the hull is a parallelogram");
  if (!(0.0 < lambda && lambda < mu && mu < 1.0))
    throw Error(ErrorKind::InvalidArgument, "hull_mixed_real needs 0 < lambda < mu < 1");
  const SystemSpec spec = SystemSpec::mixed_real(lambda, mu);
  if (eps <= 0.0) eps = detail::default_hull_eps(spec);
  const Word pm = Word::parse("pm"), mp = Word::parse("mp");
  const Word p1 = Word::parse("p"), m1 = Word::parse("m");
  std::vector<detail::Candidate> cands;
  double tail = 0.0;
  for (const Word* lead : {&pm, &mp}) {
    const EventualAddress limit_addr{Word{}, *lead};
    const Vec2 limit = project(spec, limit_addr);
    for (const Word* end : {&p1, &m1}) {
      auto f = [&](std::size_t k) {
        EventualAddress a{repeat(*lead, k), *end};
        return detail::Candidate{project(spec, a), a};
      };
      tail = std::max(tail, detail::push_family(cands, f, limit_addr, limit, eps));
    }
  }
  return detail::hull_with_addresses(cands, 1e-12 * bounding_set(spec).diameter(), tail, false);
}

inline ConvexPolygon hull_mixed_real(double lambda, double mu, double eps = -1.0) {
  return hull_mixed_real_addressed(lambda, mu, eps).polygon;
}

/// Jordan case. Vertices pi(m^k p^inf) and pi(p^k m^inf).
inline AddressedHull hull_jordan_addressed(double nu, double eps = -1.0) {
  const SystemSpec spec = SystemSpec::jordan(nu);
  if (eps <= 0.0) eps = detail::default_hull_eps(spec);
  std::vector<detail::Candidate> cands;
  double tail = 0.0;
  for (Digit lead : {Digit::m, Digit::p}) {
    const EventualAddress limit_addr{Word{}, Word(1, lead)};
    const Vec2 limit = project(spec, limit_addr);
    auto f = [&](std::size_t k) {
      EventualAddress a{power(lead, k), Word(1, flip(lead))};
      return detail::Candidate{project(spec, a), a};
    };
    tail = std::max(tail, detail::push_family(cands, f, limit_addr, limit, eps));
  }
  return detail::hull_with_addresses(cands, 1e-12 * bounding_set(spec).diameter(), tail, false);
}

inline ConvexPolygon hull_jordan(double nu, double eps = -1.0) { return hull_jordan_addressed(nu, eps).polygon; }

/// a_j = p if Im(kappa^j e^{i phi}) > tau, m if < -tau; ties resolve to p and are recorded.
inline ExtremeSequence extreme_sequence(std::complex<double> kappa, double phi, std::size_t length,
                                        double tau = kDefaultTau) {
  ExtremeSequence out;
  out.phi = phi;
  std::complex<double> z = std::polar(1.0, phi);
  for (std::size_t j = 0; j < length; ++j) {
    // normalize so the tie test is relative to |kappa^j|
    const double im = z.imag() / std::abs(z);
    if (im > tau) {
      out.digits.push_back(Digit::p);
    } else if (im < -tau) {
      out.digits.push_back(Digit::m);
    } else {
      out.digits.push_back(Digit::p);
      out.tie_positions.push_back(j);
    }
    z *= kappa;
    if (std::abs(z) < 1e-280) z /= std::abs(z);  // direction is all that matters
  }
  return out;
}

/// q' = q for odd q, q/2 for even q.
inline int q_prime(int q) { return q % 2 == 0 ? q / 2 : q; }

/// kappa = rho e^{2 pi i p/q}: the hull is a 2q'-gon whose vertices are the
/// periodic extreme addresses for directions midway between tie angles.
inline AddressedHull hull_complex_rational_addressed(double rho, int p, int q, double eps = -1.0) {
  if (q <= 0 || std::gcd(p, q) != 1) throw Error(ErrorKind::InvalidArgument, "angle p/q must be in lowest terms");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidArgument, "rho must lie in (0, 1)");
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(p) / static_cast<double>(q);
  const std::complex<double> kappa = std::polar(rho, theta);
  if (std::abs(kappa.imag()) < 1e-15) throw Error(ErrorKind::Degenerate, "kappa is real");
  const SystemSpec spec = SystemSpec::complex(kappa);
  (void)eps;
  const int qp = q_prime(q);
  std::vector<detail::Candidate> cands;
  for (int k = 0; k < 2 * qp; ++k) {
    const double phi = (static_cast<double>(k) + 0.5) * std::numbers::pi / static_cast<double>(qp);
    const ExtremeSequence seq = extreme_sequence(kappa, phi, static_cast<std::size_t>(q));
    EventualAddress a{Word{}, seq.digits};
    cands.push_back({project(spec, a), a});
  }
  auto out = detail::hull_with_addresses(cands, 0.0, 0.0, true);
  return out;
}

inline ConvexPolygon hull_complex_rational(double rho, int p, int q, double eps = -1.0) {
  return hull_complex_rational_addressed(rho, p, q, eps).polygon;
}

/// Sound hull by support queries. Starts from a few equally spaced directions and
/// queries the outward normal of every edge until each edge is within eps of its
/// support line or `max_directions` queries are spent. The vertices are attractor
/// points pi(w p^inf) for extreme prefixes w; the slack covers the corners of the
/// polygon cut out by all queried support lines.
inline AddressedHull support_hull_addressed(const SystemSpec& spec, std::size_t max_directions = 4096,
                                            double eps = -1.0) {
  if (max_directions < 8) throw Error(ErrorKind::InvalidArgument, "need at least 8 support directions");
  if (eps <= 0.0) eps = detail::default_hull_eps(spec);
  const Mat2 m = spec.linear();
  const Vec2 u = spec.translation();
  const BoundingSet k0 = bounding_set(spec);

  // Prefix length so that M^L K is below eps / 4 in size.
  std::size_t len = 1;
  Mat2 ml = m;
  while (k0.image({ml, {}}).max_norm() > 0.25 * eps && len < 20000) {
    ml = ml * m;
    ++len;
  }
  const double tail = k0.image({ml, {}}).max_norm();

  std::vector<Vec2> basis(len);
  {
    Vec2 v = u;
    for (std::size_t j = 0; j < len; ++j) {
      basis[j] = v;
      v = m * v;
    }
  }

  struct Query {
    double angle;
    Vec2 dir;
    double height;  // upper bound on the support value
  };
  std::vector<Query> queries;
  std::vector<detail::Candidate> cands;
  auto query = [&](const Vec2& d) {
    Word w;
    double h = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      const double s = dot(basis[j], d);
      w.push_back(s >= 0.0 ? Digit::p : Digit::m);
      h += std::abs(s);
    }
    EventualAddress a{w, Word(1, Digit::p)};
    const Vec2 pt = project(spec, a);
    queries.push_back({std::atan2(d.y, d.x), d, h + tail});
    cands.push_back({pt, a});
    return std::pair{pt, h + tail};
  };

  const double tol = 1e-12 * k0.diameter();
  constexpr std::size_t kInitial = 32;
  for (std::size_t i = 0; i < kInitial; ++i) {
    const double ang = 2.0 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(kInitial);
    query({std::cos(ang), std::sin(ang)});
  }
  AddressedHull out = detail::hull_with_addresses(cands, tol, 0.0, false);
  for (bool grew = true; grew && queries.size() < max_directions;) {
    grew = false;
    const ConvexPolygon current = out.polygon;
    for (std::size_t i = 0; i < current.size() && queries.size() < max_directions; ++i) {
      const Vec2 n = edge_normal(current, i);
      const auto [pt, h] = query(n);
      if (dot(pt, n) - dot(current[i], n) > eps) grew = true;
    }
    out = detail::hull_with_addresses(cands, tol, 0.0, false);
  }

  // Corners of angularly consecutive support lines. Near-parallel neighbours are
  // skipped, which only enlarges the outer region.
  std::sort(queries.begin(), queries.end(), [](const Query& a, const Query& b) { return a.angle < b.angle; });
  std::vector<Query> lines;
  for (const auto& q : queries)
    if (lines.empty() || q.angle - lines.back().angle > 1e-7) lines.push_back(q);
  if (lines.size() > 1 && lines.front().angle + 2.0 * std::numbers::pi - lines.back().angle <= 1e-7) lines.pop_back();
  double corner = 0.0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Query& l1 = lines[i];
    const Query& l2 = lines[(i + 1) % lines.size()];
    double gap = l2.angle - l1.angle;
    if (gap <= 0.0) gap += 2.0 * std::numbers::pi;
    if (gap >= std::numbers::pi) throw Error(ErrorKind::Degenerate, "support directions leave a half-plane gap");
    const double det = cross(l1.dir, l2.dir);
    const Vec2 c{(l1.height * l2.dir.y - l2.height * l1.dir.y) / det,
                 (l2.height * l1.dir.x - l1.height * l2.dir.x) / det};
    corner = std::max(corner, distance_to_core(out.polygon, c));
  }
  out.polygon.slack = corner + tol;
  return out;
}

inline ConvexPolygon support_hull(const SystemSpec& spec, std::size_t max_directions = 4096, double eps = -1.0) {
  return support_hull_addressed(spec, max_directions, eps).polygon;
}

/// Irrational-angle complex case: an "infinite polygon", so the result is a sound
/// truncation (closed = false).
inline AddressedHull hull_complex_irrational_addressed(std::complex<double> kappa, double eps = -1.0,
                                                       std::size_t max_directions = 4096) {
  return support_hull_addressed(SystemSpec::complex(kappa), max_directions, eps);
}

inline ConvexPolygon hull_complex_irrational(std::complex<double> kappa, double eps = -1.0,
                                             std::size_t max_directions = 4096) {
  return hull_complex_irrational_addressed(kappa, eps, max_directions).polygon;
}

/// MixedReal(lambda, lambda): with X the even-index part and Y the odd-index part
/// of sum a_i lambda^i, pi = (X - Y, X + Y), a parallelogram.
inline AddressedHull hull_mixed_equal_addressed(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidArgument, "lambda must lie in (0, 1)");
  const SystemSpec spec = SystemSpec::mixed_real(lambda, lambda);
  std::vector<detail::Candidate> cands;
  for (Digit even : {Digit::p, Digit::m})
    for (Digit odd : {Digit::p, Digit::m}) {
      EventualAddress a{Word{}, Word{std::vector<Digit>{even, odd}}};
      cands.push_back({project(spec, a), a});
    }
  return detail::hull_with_addresses(cands, 0.0, 0.0, true);
}

inline ConvexPolygon hull_mixed_equal(double lambda) { return hull_mixed_equal_addressed(lambda).polygon; }

/// Best available hull for a spec. Complex specs are treated as irrational-declared.
inline AddressedHull hull_of_addressed(const SystemSpec& spec, double eps = -1.0) {
  switch (spec.kind()) {
    case CaseKind::MixedReal: {
      const auto& c = spec.as<MixedReal>();
      if (c.lambda == c.mu) return hull_mixed_equal_addressed(c.lambda);
      if (c.lambda < c.mu) return hull_mixed_real_addressed(c.lambda, c.mu, eps);
      // Alternating the digits swaps the roles of the two eigenvalues and the coordinates.
      AddressedHull sw = hull_mixed_real_addressed(c.mu, c.lambda, eps);
      AddressedHull out;
      out.polygon = transform(sw.polygon, Mat2{0.0, 1.0, 1.0, 0.0}, Vec2{});
      for (auto it = sw.addresses.rbegin(); it != sw.addresses.rend(); ++it)
        out.addresses.push_back(detail::alternate(*it));
      return out;
    }
    case CaseKind::Jordan: return hull_jordan_addressed(spec.as<Jordan>().nu, eps);
    case CaseKind::PositiveReal:
    case CaseKind::Complex: break;
  }
  return support_hull_addressed(spec, 4096, eps);
}

inline ConvexPolygon hull_of(const SystemSpec& spec, double eps = -1.0) { return hull_of_addressed(spec, eps).polygon; }

/// "x,y" per line, counter-clockwise.
inline std::string polygon_csv(const ConvexPolygon& poly) {
  std::ostringstream os;
  os.precision(17);
  os << "x,y\n";
  for (const auto& v : poly.vertices) os << v.x << ',' << v.y << '\n';
  return os.str();
}

}  // namespace saffine
