#pragma once

// Point membership by branch and bound over cylinders.
//
// A is covered by F_w(K_0) over all words w of a fixed length, so a point at
// positive distance from every surviving F_w(K_0) is outside A. Nodes carry the
// pulled-back point q_w = F_w^{-1}(q); the distance from q to F_w(K_0) is then
// bounded below edge by edge without ever forming F_w(K_0).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "saffine/expansion.hpp"
#include "saffine/hull.hpp"
#include "saffine/system.hpp"

namespace saffine {

enum class VerdictKind { In, Out, Unknown };

inline std::string to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::In: return "in";
    case VerdictKind::Out: return "out";
    case VerdictKind::Unknown: return "unknown";
  }
  return "?";
}

/// How an In verdict was obtained.
enum class InWitness { None, Expansion, LimitPoint };

struct MembershipVerdict {
  VerdictKind kind = VerdictKind::Unknown;
  int depth = 0;                 // Out: deepest pruning depth; Unknown: depth reached
  double min_separation = 0.0;   // Out: lower bound on dist(point, A)
  Word address_prefix;           // In
  double residual_error = 0.0;   // In
  InWitness witness = InWitness::None;
  std::size_t nodes = 0;         // nodes expanded

  bool in() const { return kind == VerdictKind::In; }
  bool out() const { return kind == VerdictKind::Out; }
};

/// Starting set for the subdivision.
enum class InitialSet {
  Hull,         // exact hull (with slack) from the hull module
  BoundingSet,  // coordinatewise box, or a polygon around the bounding ellipse
};

struct MembershipOptions {
  double tau = kDefaultTau;       // prune threshold, relative to the diameter of K_0
  double tolerance = 1e-9;        // In: accepted residual
  std::size_t max_nodes = 2'000'000;
  std::size_t queue_capacity = 1 << 16;
  InitialSet initial = InitialSet::Hull;
  bool use_expansion = true;      // try an interior certificate for In
};

namespace detail {

/// Polygon around the ellipse {c + S w : |w| <= r}: image of a circumscribed 64-gon.
inline ConvexPolygon ellipse_polygon(const Ellipse& e) {
  constexpr int n = 64;
  const double r = e.radius / std::cos(std::numbers::pi / n);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    pts.push_back(e.center + e.shape * Vec2{r * std::cos(a), r * std::sin(a)});
  }
  ConvexPolygon out = convex_hull(pts);
  return out;
}

inline ConvexPolygon bounding_polygon(const SystemSpec& spec) {
  const BoundingSet k = bounding_set(spec);
  if (k.is_polygon()) return k.polygon();
  return ellipse_polygon(k.ellipse());
}

}  // namespace detail

inline ConvexPolygon initial_set(const SystemSpec& spec, InitialSet which) {
  if (which == InitialSet::Hull) return hull_of(spec);
  return detail::bounding_polygon(spec);
}

/// Decide whether `point` lies in A. `max_depth` bounds the word length explored.
inline MembershipVerdict decide_point(const SystemSpec& spec, const Vec2& point, int max_depth,
                                      const MembershipOptions& opt = {}) {
  if (max_depth < 1) throw Error(ErrorKind::InvalidArgument, "max_depth must be >= 1");
  MembershipVerdict out;

  std::optional<InteriorCertificate> cert;
  if (opt.use_expansion && (spec.is<MixedReal>() || spec.is<Jordan>())) {
    try {
      cert = interior_radius(spec, default_tool_polynomial(spec));
    } catch (const Error&) {
    }
  }

  const ConvexPolygon k0 = initial_set(spec, opt.initial);
  const auto planes = half_planes(k0);
  const double prune_at = opt.tau * std::max(1.0, diameter(k0));
  const Mat2 m = spec.linear();
  const Mat2 minv = m.inverse();
  const Vec2 u = spec.translation();
  const Vec2 fixed_p = project(spec, EventualAddress{});  // pi(p^inf)

  // Per depth: M^k and ||(M^{-T})^k n_e|| for every edge.
  const auto depth_count = static_cast<std::size_t>(max_depth) + 1;
  std::vector<Mat2> mk(depth_count);
  std::vector<std::vector<double>> scale(depth_count, std::vector<double>(planes.size()));
  {
    Mat2 p = Mat2::identity(), pinv_t = Mat2::identity();
    for (std::size_t k = 0; k < depth_count; ++k) {
      mk[k] = p;
      for (std::size_t e = 0; e < planes.size(); ++e) scale[k][e] = (pinv_t * planes[e].normal).norm();
      p = p * m;
      pinv_t = pinv_t * minv.transpose();
    }
  }

  struct Node {
    Vec2 q;           // F_w^{-1}(point)
    int depth;
    double margin;    // lower bound on dist(point, F_w(K_0)); negative inside
    std::size_t id;   // arena index for address reconstruction
  };
  struct Link {
    std::size_t parent;
    Digit digit;
  };
  std::vector<Link> arena;
  auto address_of = [&](std::size_t id) {
    Word w;
    while (id != 0) {
      w.push_back(arena[id].digit);
      id = arena[id].parent;
    }
    return w.reversed();
  };
  auto margin_of = [&](const Vec2& q, int depth) {
    double best = -std::numeric_limits<double>::infinity();
    const auto& sc = scale[static_cast<std::size_t>(depth)];
    for (std::size_t e = 0; e < planes.size(); ++e)
      best = std::max(best, (dot(planes[e].normal, q) - planes[e].offset) / sc[e]);
    return best;
  };

  auto cmp = [](const Node& a, const Node& b) { return a.margin > b.margin; };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> frontier(cmp);
  std::vector<Node> overflow;  // depth-first spill when the queue is full

  arena.push_back({0, Digit::p});
  double min_sep = std::numeric_limits<double>::infinity();
  int prune_depth = 0;
  bool exhausted = false;
  int deepest = 0;

  const double m0 = margin_of(point, 0);
  if (m0 > prune_at) {
    out.kind = VerdictKind::Out;
    out.depth = 0;
    out.min_separation = m0;
    return out;
  }
  frontier.push({point, 0, m0, 0});

  while (!frontier.empty() || !overflow.empty()) {
    Node node;
    if (!frontier.empty()) {
      node = frontier.top();
      frontier.pop();
    } else {
      node = overflow.back();
      overflow.pop_back();
    }
    ++out.nodes;
    deepest = std::max(deepest, node.depth);

    // In via an interior certificate at the pulled-back point.
    if (cert && std::abs(node.q.x) < cert->delta && std::abs(node.q.y) < cert->delta) {
      const double target = opt.tolerance / std::max(mk[static_cast<std::size_t>(node.depth)].norm(), 1e-300);
      try {
        const ExpansionRun run = expand_point(*cert, node.q, 4000, std::min(target, opt.tolerance));
        const double err = mk[static_cast<std::size_t>(node.depth)].norm() * run.error_estimate;
        if (err <= opt.tolerance) {
          out.kind = VerdictKind::In;
          out.witness = InWitness::Expansion;
          out.address_prefix = address_of(node.id) + run.digits;
          out.residual_error = err;
          out.depth = node.depth;
          return out;
        }
      } catch (const Error&) {
      }
    }
    // In via a limit point: pi(w p^inf) - point = M^k (pi(p^inf) - q_w).
    {
      const double d = (mk[static_cast<std::size_t>(node.depth)] * (fixed_p - node.q)).norm();
      if (d <= opt.tolerance) {
        out.kind = VerdictKind::In;
        out.witness = InWitness::LimitPoint;
        out.address_prefix = address_of(node.id);
        out.residual_error = d;
        out.depth = node.depth;
        return out;
      }
    }

    if (node.depth >= max_depth) {
      exhausted = true;
      continue;
    }
    if (out.nodes >= opt.max_nodes) {
      exhausted = true;
      break;
    }
    for (Digit s : {Digit::m, Digit::p}) {
      const Vec2 q = minv * (node.q - u * value(s));
      const int depth = node.depth + 1;
      const double mg = margin_of(q, depth);
      if (mg > prune_at) {
        min_sep = std::min(min_sep, mg);
        prune_depth = std::max(prune_depth, depth);
        continue;
      }
      arena.push_back({node.id, s});
      const Node child{q, depth, mg, arena.size() - 1};
      if (frontier.size() < opt.queue_capacity) frontier.push(child);
      else overflow.push_back(child);
    }
  }

  if (exhausted) {
    out.kind = VerdictKind::Unknown;
    out.depth = deepest;
    return out;
  }
  out.kind = VerdictKind::Out;
  out.depth = prune_depth;
  out.min_separation = min_sep;
  return out;
}

// ---------------------------------------------------------------------------
// Parameter scans

enum class CellVerdict { CertifiedIn, CertifiedOut, Unknown };

inline std::string to_string(CellVerdict v) {
  switch (v) {
    case CellVerdict::CertifiedIn: return "certified-in";
    case CellVerdict::CertifiedOut: return "certified-out";
    case CellVerdict::Unknown: return "unknown";
  }
  return "?";
}

struct ScanRect {
  double x0, x1;        // lambda (or nu) range
  double y0 = 0, y1 = 0;  // mu range; ignored for Jordan
};

struct ScanCell {
  double lambda = 0.0;  // nu for Jordan
  double mu = 0.0;
  CellVerdict verdict = CellVerdict::Unknown;
  std::string certificate_id;
  std::optional<InteriorCertificate> interior;  // certified-in
  std::optional<MembershipVerdict> membership;  // certified-out
};

struct RegionScan {
  CaseKind kind = CaseKind::MixedReal;
  ScanRect rect{};
  int nx = 0, ny = 0;
  int max_depth = 0;
  std::vector<ScanCell> cells;  // row-major: index = j * nx + i

  const ScanCell& at(int i, int j) const { return cells[static_cast<std::size_t>(j * nx + i)]; }

  std::size_t count(CellVerdict v) const {
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [v](const ScanCell& c) { return c.verdict == v; }));
  }

  std::string csv() const {
    std::ostringstream os;
    os.precision(17);
    if (kind == CaseKind::Jordan) os << "nu,verdict,certificate_id\n";
    else os << "lambda,mu,verdict,certificate_id\n";
    for (const auto& c : cells) {
      os << c.lambda << ',';
      if (kind != CaseKind::Jordan) os << c.mu << ',';
      os << to_string(c.verdict) << ',' << c.certificate_id << '\n';
    }
    return os.str();
  }
};

inline ScanCell scan_cell(CaseKind kind, double a, double b, int max_depth, const MembershipOptions& opt,
                          const std::string& id) {
  ScanCell cell;
  cell.lambda = a;
  cell.mu = b;
  const SystemSpec spec = kind == CaseKind::Jordan ? SystemSpec::jordan(a) : SystemSpec::mixed_real(a, b);
  try {
    const ToolPolynomial poly = kind == CaseKind::Jordan ? jordan_poly(a) : mixed_real_poly(a, b);
    cell.interior = interior_radius(spec, poly);
    cell.verdict = CellVerdict::CertifiedIn;
    cell.certificate_id = "in-" + id;
    return cell;
  } catch (const Error&) {
  }
  MembershipOptions o = opt;
  o.use_expansion = false;  // already failed above
  const MembershipVerdict v = decide_point(spec, {0.0, 0.0}, max_depth, o);
  if (v.out()) {
    cell.verdict = CellVerdict::CertifiedOut;
    cell.certificate_id = "out-" + id;
    cell.membership = v;
  }
  // An In answer here would only show 0 in A, not 0 in int(A).
  return cell;
}

/// Evaluates cell centres of an nx-by-ny grid (ny ignored for Jordan) on `threads`
/// workers; results are stored by cell index so the output does not depend on threads.
inline RegionScan scan_region(CaseKind kind, const ScanRect& rect, int nx, int ny, int max_depth,
                              unsigned threads = 0, MembershipOptions opt = {}) {
  if (kind != CaseKind::MixedReal && kind != CaseKind::Jordan)
    throw Error(ErrorKind::InvalidArgument, "scan_region supports the mixed and jordan cases");
  if (nx < 1 || (kind == CaseKind::MixedReal && ny < 1)) throw Error(ErrorKind::InvalidArgument, "empty grid");
  if (kind == CaseKind::Jordan) ny = 1;
  auto in_unit = [](double a, double b) { return a > 0.0 && b < 1.0 && a < b; };
  if (!in_unit(rect.x0, rect.x1) || (kind == CaseKind::MixedReal && !in_unit(rect.y0, rect.y1)))
    throw Error(ErrorKind::InvalidArgument, "scan rectangle must lie inside the unit square");
  if (opt.max_nodes == MembershipOptions{}.max_nodes) opt.max_nodes = 200'000;

  RegionScan scan;
  scan.kind = kind;
  scan.rect = rect;
  scan.nx = nx;
  scan.ny = ny;
  scan.max_depth = max_depth;
  scan.cells.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < scan.cells.size(); idx = next++) {
      const int i = static_cast<int>(idx % static_cast<std::size_t>(nx));
      const int j = static_cast<int>(idx / static_cast<std::size_t>(nx));
      const double a = rect.x0 + (i + 0.5) * (rect.x1 - rect.x0) / nx;
      const double b = kind == CaseKind::Jordan ? 0.0 : rect.y0 + (j + 0.5) * (rect.y1 - rect.y0) / ny;
      scan.cells[idx] = scan_cell(kind, a, b, max_depth, opt, std::to_string(idx));
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return scan;
}

}  // namespace saffine
