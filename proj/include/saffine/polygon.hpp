#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "saffine/linalg.hpp"

namespace saffine {

/// Convex polygon with counter-clockwise vertices.
///
/// `slack` is a Hausdorff-distance allowance: a set described by a polygon with
/// slack s is contained in the polygon dilated by a disc of radius s. Truncated
/// hulls of attractors with infinitely many extreme points carry the tail bound
/// here so that containment and separation tests stay sound.
struct ConvexPolygon {
  std::vector<Vec2> vertices;
  bool closed = true;
  double slack = 0.0;

  std::size_t size() const { return vertices.size(); }
  const Vec2& operator[](std::size_t i) const { return vertices[i]; }
};

namespace detail {

inline double orient(const Vec2& o, const Vec2& a, const Vec2& b) { return cross(a - o, b - o); }

}  // namespace detail

/// Andrew's monotone chain. Points within `tol` of a supporting segment are dropped,
/// so the output is strictly convex.
inline ConvexPolygon convex_hull(std::vector<Vec2> pts, double tol = 0.0) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  ConvexPolygon out;
  if (pts.size() < 3) {
    out.vertices = pts;
    return out;
  }
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  // A turn counts only if the middle point sits more than tol off the chord.
  auto keeps = [tol](const Vec2& o, const Vec2& a, const Vec2& b) {
    const double len = (b - o).norm();
    return detail::orient(o, a, b) > tol * std::max(len, 1e-300);
  };
  for (const auto& p : pts) {
    while (k >= 2 && !keeps(h[k - 2], h[k - 1], p)) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && !keeps(h[k - 2], h[k - 1], pts[i])) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  out.vertices = std::move(h);
  return out;
}

inline bool is_strictly_convex(const ConvexPolygon& poly, double tol = 0.0) {
  const auto n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2& c = poly[(i + 2) % n];
    if (detail::orient(a, b, c) <= tol) return false;
  }
  return true;
}

inline double area(const ConvexPolygon& poly) {
  double s = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * s;
}

/// Support function h(d) = max over the (slack-dilated) polygon of <x, d>.
inline double support(const ConvexPolygon& poly, const Vec2& d) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : poly.vertices) best = std::max(best, dot(v, d));
  return best + poly.slack * d.norm();
}

inline double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

/// True when p lies in the polygon itself (slack ignored). O(log n).
inline bool inside_core(const ConvexPolygon& poly, const Vec2& p) {
  const auto n = poly.size();
  if (n == 0) return false;
  if (n == 1) return p == poly[0];
  if (n == 2) return distance_to_segment(p, poly[0], poly[1]) == 0.0;
  const Vec2& o = poly[0];
  if (detail::orient(o, poly[1], p) < 0.0 || detail::orient(o, poly[n - 1], p) > 0.0) return false;
  std::size_t lo = 1, hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (detail::orient(o, poly[mid], p) >= 0.0) lo = mid; else hi = mid;
  }
  return detail::orient(poly[lo], poly[lo + 1], p) >= 0.0;
}

/// Euclidean distance from p to the polygon (zero inside), slack ignored.
inline double distance_to_core(const ConvexPolygon& poly, const Vec2& p) {
  if (inside_core(poly, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto n = poly.size();
  for (std::size_t i = 0; i < n; ++i) best = std::min(best, distance_to_segment(p, poly[i], poly[(i + 1) % n]));
  return best;
}

/// Containment in the polygon dilated by slack + tol.
inline bool contains(const ConvexPolygon& poly, const Vec2& p, double tol = 0.0) {
  if (inside_core(poly, p)) return true;
  return distance_to_core(poly, p) <= poly.slack + tol;
}

inline double diameter(const ConvexPolygon& poly) {
  double best = 0.0;
  const auto n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, distance(poly[i], poly[j]));
  return best + 2.0 * poly.slack;
}

/// Image under x -> L x + c. Slack scales by the operator norm of L.
inline ConvexPolygon transform(const ConvexPolygon& poly, const Mat2& linear, const Vec2& offset) {
  ConvexPolygon out;
  out.closed = poly.closed;
  out.slack = poly.slack * linear.norm();
  out.vertices.reserve(poly.size());
  for (const auto& v : poly.vertices) out.vertices.push_back(linear * v + offset);
  if (linear.det() < 0.0) std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

inline ConvexPolygon negate(const ConvexPolygon& poly) {
  return transform(poly, Mat2::diag(-1.0, -1.0), Vec2{});
}

/// Unit outward normal of edge i (from vertex i to vertex i+1).
inline Vec2 edge_normal(const ConvexPolygon& poly, std::size_t i) {
  const Vec2 e = poly[(i + 1) % poly.size()] - poly[i];
  const double len = e.norm();
  return len > 0.0 ? Vec2{e.y / len, -e.x / len} : Vec2{};
}

/// Lower bound on the Euclidean gap between two slack-dilated polygons via the
/// separating-axis test over both polygons' edge normals. Positive means disjoint.
inline double separation(const ConvexPolygon& a, const ConvexPolygon& b) {
  double best = -std::numeric_limits<double>::infinity();
  auto try_axis = [&](const Vec2& n) {
    if (n.x == 0.0 && n.y == 0.0) return;
    const double gap = -support(b, -n) - support(a, n);
    best = std::max(best, gap);
  };
  for (std::size_t i = 0; i < a.size(); ++i) try_axis(edge_normal(a, i));
  for (std::size_t i = 0; i < b.size(); ++i) try_axis(-edge_normal(b, i));
  if (a.size() < 3 || b.size() < 3) {
    // Degenerate pieces (points, segments): also test the axis through the closest pair.
    for (const auto& p : a.vertices)
      for (const auto& q : b.vertices) {
        const Vec2 d = q - p;
        const double len = d.norm();
        if (len > 0.0) try_axis(d / len);
      }
  }
  return best;
}

/// Half-plane description: <normal, x> <= offset, normals unit length, slack folded into offsets.
struct HalfPlane {
  Vec2 normal;
  double offset;
};

inline std::vector<HalfPlane> half_planes(const ConvexPolygon& poly) {
  std::vector<HalfPlane> out;
  out.reserve(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 n = edge_normal(poly, i);
    out.push_back({n, dot(n, poly[i]) + poly.slack});
  }
  return out;
}

}  // namespace saffine
