// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// `acceptance --write-goldens` regenerates the stored render goldens instead.

#include <chrono>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"

#ifndef SAFFINE_GOLDEN_DIR
#define SAFFINE_GOLDEN_DIR "tests/golden"
#endif

using namespace saffine;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 10) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

// 1 ------------------------------------------------------------------------

Outcome expansion_round_trip() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double worst_mixed = 0, worst_jordan = 0, worst_residual = 0;
  std::size_t longest = 0;
  for (const auto& [spec, tol] : {std::pair{SystemSpec::mixed_real(0.72, 0.95), 1e-9}, std::pair{SystemSpec::jordan(0.85), 1e-8}}) {
    const InteriorCertificate cert = interior_radius(spec, default_tool_polynomial(spec));
    std::uniform_real_distribution<double> u(-cert.delta, cert.delta);
    for (int t = 0; t < 100; ++t) {
      Vec2 target{u(rng), u(rng)};
      while (std::max(std::abs(target.x), std::abs(target.y)) >= cert.delta) target = {u(rng), u(rng)};
      const ExpansionRun run = expand_point(cert, target, 400, std::min(tol, 1e-9));
      const double err = distance(oracle::finite_projection(spec, run.digits), target);
      (spec.is<Jordan>() ? worst_jordan : worst_mixed) = std::max(spec.is<Jordan>() ? worst_jordan : worst_mixed, err);
      worst_residual = std::max(worst_residual, run.max_residual);
      longest = std::max(longest, run.digits.size());
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst_mixed <= 1e-9 && worst_jordan <= 1e-8 && worst_residual <= 1.0 + 1e-12 && longest <= 400 && secs < 5.0;
  return {ok, "mixed err " + fmt(worst_mixed, 3) + ", jordan err " + fmt(worst_jordan, 3) + ", max |u| " +
                  fmt(worst_residual, 15) + ", digits <= " + std::to_string(longest) + ", " + fmt(secs, 3) + " s"};
}

// 2 ------------------------------------------------------------------------

// The constructors refuse polynomials with sum |b_j| > 2.
bool jordan_poly_ok(double nu) {
  try {
    return check_tool_conditions(SystemSpec::jordan(nu), jordan_poly(nu)).passed();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CoefficientSumExceeded) throw;
    return false;
  }
}

bool mixed_poly_ok(double lambda, double mu) {
  try {
    return check_tool_conditions(SystemSpec::mixed_real(lambda, mu), mixed_real_poly(lambda, mu)).passed();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CoefficientSumExceeded) throw;
    return false;
  }
}

Outcome jordan_threshold() {
  double lo = 0.5, hi = 0.99;  // fails at lo, succeeds at hi
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (jordan_poly_ok(mid) ? hi : lo) = mid;
  }
  const double nu = 0.5 * (lo + hi);
  const double expected = 0.831458513;
  return {std::abs(nu - expected) <= 1e-7,
          "crossing at nu = " + fmt(nu, 12) + ", expected " + fmt(expected, 12) + " +- 1e-7"};
}

Outcome mixed_grid() {
  const double a = 1.0 / std::sqrt(2.0), b = 0.999;
  int passed = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double lam = a + (b - a) * i / 19.0, mu = a + (b - a) * j / 19.0;
      if (mixed_poly_ok(lam, mu)) ++passed;
    }
  const bool fails_outside = !mixed_poly_ok(0.5, 0.9);
  return {passed == 400 && fails_outside,
          std::to_string(passed) + "/400 grid points pass, (0.5, 0.9) " + (fails_outside ? "fails" : "passes")};
}

// 3 ------------------------------------------------------------------------

Outcome komornik_loreti_constant() {
  const double b = komornik_loreti();
  const auto t = thue_morse(400);
  double s = 0, pw = 1;
  for (std::size_t n = 1; n < t.size(); ++n) {
    pw /= b;
    s += t[n] * pw;
  }
  const double residual = std::abs(s - 1.0);
  return {std::abs(b - 1.787231650) <= 1e-8 && residual < 1e-10,
          "beta* = " + fmt(b, 12) + ", residual " + fmt(residual, 3)};
}

// 4 ------------------------------------------------------------------------

Outcome rauzy_dimension() {
  const std::complex<double> k = rauzy_kappa();
  const double dim = -std::log(kGolden) / std::log(std::abs(k));
  return {std::abs(dim - 1.579354467) <= 1e-6 && std::abs(k * k * k - k * k - k - 1.0) < 1e-12,
          "|kappa| = " + fmt(std::abs(k), 12) + ", dimension " + fmt(dim, 12)};
}

// 5 ------------------------------------------------------------------------

Outcome rational_hull_counts() {
  const std::array<std::array<int, 3>, 3> cases{{{1, 4, 4}, {1, 5, 10}, {1, 6, 6}}};
  std::string detail;
  bool ok = true;
  for (const auto& [p, q, want] : cases) {
    const AddressedHull h = hull_complex_rational_addressed(0.7, p, q);
    const SystemSpec spec = SystemSpec::complex(std::polar(0.7, 2.0 * std::numbers::pi * p / q));
    double worst = 0;
    for (std::size_t i = 0; i < h.addresses.size(); ++i)
      worst = std::max(worst, distance(project(spec, h.addresses[i]), h.polygon.vertices[i]));
    ok = ok && static_cast<int>(h.polygon.size()) == want && worst <= 1e-9;
    detail += std::to_string(p) + "/" + std::to_string(q) + ": " + std::to_string(h.polygon.size()) + " vertices (attained to " +
              fmt(worst, 2) + ") ";
  }
  return {ok, detail};
}

// 6 ------------------------------------------------------------------------

Outcome hull_containment() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(606);
  std::size_t outside = 0, total = 0;
  for (CaseKind kind : {CaseKind::PositiveReal, CaseKind::MixedReal, CaseKind::Jordan, CaseKind::Complex})
    for (int s = 0; s < 10; ++s) {
      const SystemSpec spec = oracle::random_spec(kind, rng);
      const ConvexPolygon hull = hull_of(spec, 1e-9);
      const Mat2 m = spec.linear();
      std::vector<Vec2> steps{spec.translation()};
      for (int i = 1; i < 60; ++i) steps.push_back(m * steps.back());
      for (int k = 0; k < 100000; ++k) {
        Vec2 p{};
        std::uint64_t bits = rng();
        for (int i = 0; i < 60; ++i) p += ((bits >> i) & 1U) ? steps[static_cast<std::size_t>(i)] : -steps[static_cast<std::size_t>(i)];
        ++total;
        if (!contains(hull, p, 1e-6)) ++outside;
      }
    }
  const double secs = seconds_since(t0);
  return {outside == 0 && secs < 30.0,
          std::to_string(outside) + " of " + std::to_string(total) + " prefix points outside, " + fmt(secs, 3) + " s"};
}

// 7 ------------------------------------------------------------------------

Outcome minkowski_identity() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> r(0.2, 0.95), ang(0.1, 3.0);
  double worst = 0;
  for (int s = 0; s < 10; ++s) {
    const std::complex<double> k = std::polar(r(rng), ang(rng));
    const SystemSpec base = SystemSpec::complex(k), squared = SystemSpec::complex(k * k);
    for (int t = 0; t < 1000; ++t) {
      const EventualAddress a(oracle::random_word(rng, 1 + rng() % 40), oracle::random_word(rng, 1 + rng() % 5));
      const Vec2 lhs = project(base, a);
      const Vec2 even = project(squared, a.decimate(2, 0));
      const Vec2 odd = project(squared, a.decimate(2, 1));
      const std::complex<double> rhs = std::complex<double>(even.x, even.y) + k * std::complex<double>(odd.x, odd.y);
      worst = std::max(worst, std::abs(std::complex<double>(lhs.x, lhs.y) - rhs));
    }
  }
  return {worst <= 1e-10, "max deviation " + fmt(worst, 3)};
}

// 8 ------------------------------------------------------------------------

Outcome membership() {
  MembershipOptions box;
  box.initial = InitialSet::BoundingSet;
  const MembershipVerdict out = decide_point(SystemSpec::mixed_real(0.3, 0.4), {0.0, 0.0}, 30, box);
  const double gap = 1.0 - 0.3 / 0.7;
  const bool out_ok = out.out() && std::abs(out.min_separation - gap) <= 0.1 * gap;
  const MembershipVerdict in = decide_point(SystemSpec::mixed_real(0.72, 0.95), {0.3, 0.2}, 30);

  const auto t0 = std::chrono::steady_clock::now();
  const RegionScan scan = scan_region(CaseKind::MixedReal, {0.2, 0.99, 0.2, 0.99}, 32, 32, 20, 0);
  const double secs = seconds_since(t0);
  int square = 0, square_in = 0;
  for (const auto& c : scan.cells)
    if (c.lambda >= 1.0 / std::sqrt(2.0) && c.mu >= 1.0 / std::sqrt(2.0)) {
      ++square;
      if (c.verdict == CellVerdict::CertifiedIn) ++square_in;
    }
  const bool ok = out_ok && in.in() && secs < 60.0 && square > 0 && square_in == square;
  return {ok, "origin " + std::string(to_string(out.kind)) + " sep " + fmt(out.min_separation, 4) + " (gap " + fmt(gap, 4) +
                  "), interior point " + std::string(to_string(in.kind)) + ", scan " + fmt(secs, 3) + " s, square " +
                  std::to_string(square_in) + "/" + std::to_string(square) + " certified-in"};
}

// 9 ------------------------------------------------------------------------

Outcome uniqueness_certificates() {
  const std::vector<std::pair<std::string, SystemSpec>> specs{{"mixed(0.55,0.8)", SystemSpec::mixed_real(0.55, 0.8)},
                                                              {"jordan(0.7)", SystemSpec::jordan(0.7)},
                                                              {"rauzy", SystemSpec::complex(rauzy_kappa())}};
  bool ok = true;
  std::string detail;
  for (const auto& [name, spec] : specs) {
    const UniquenessCertificate c = certify_uniqueness(spec);
    const oracle::CylinderOracle o(spec);
    const std::size_t len = 3 * ((c.u + c.v).size() + (c.u + c.w).size());
    std::size_t words = 0;
    const bool sound = o.language_is_unique(c.u, c.v, c.w, len, &words);
    ok = ok && sound && c.entropy > 0.0 && verify_certificate(c);
    detail += name + " u=" + c.u.str() + " v=" + c.v.str() + " w=" + c.w.str() + " h=" + fmt(c.entropy, 4) + " oracle " +
              (sound ? "ok" : "REJECTS") + " (" + std::to_string(words) + " words); ";
  }
  return {ok, detail};
}

// 10 -----------------------------------------------------------------------

Outcome classification_table() {
  const double bstar = komornik_loreti();
  const std::vector<std::pair<double, UniquenessClass>> sweep{{1.3, UniquenessClass::FiniteNonEmpty},
                                                              {1.7, UniquenessClass::CountablyInfinite},
                                                              {bstar, UniquenessClass::UncountableZeroDim},
                                                              {1.9, UniquenessClass::PositiveDim}};
  bool ok = true;
  std::string detail;
  for (const auto& [beta, want] : sweep)
    for (const auto& [p, q, qp] : {std::array<int, 3>{1, 4, 2}, std::array<int, 3>{1, 5, 5}}) {
      const RationalClassification r = classify_rational(std::pow(beta, -1.0 / qp), p, q);
      ok = ok && r.cls == want;
      if (q == 4) detail += fmt(beta, 6) + " -> " + std::string(to_string(r.cls)) + (r.boundary ? " (boundary)" : "") + "; ";
    }
  const double edge = 1.0 / std::sqrt(2.0);
  const auto below = classify_mixed_equal(edge - 0.01), above = classify_mixed_equal(edge + 0.01);
  ok = ok && below.geometry == MixedEqualGeometry::TotallyDisconnected && above.geometry == MixedEqualGeometry::Parallelogram;
  detail += "lambda = 1/sqrt2 -+ 0.01: " + std::string(to_string(below.geometry)) + " / " + std::string(to_string(above.geometry));
  return {ok, detail};
}

// 11 -----------------------------------------------------------------------

RasterConfig golden_config() {
  RasterConfig c;
  c.width = c.height = 512;
  c.method = ChaosGame{10'000'000, 1, 100};
  c.threads = 0;
  return c;
}

const std::vector<std::pair<std::string, SystemSpec>>& golden_specs() {
  static const std::vector<std::pair<std::string, SystemSpec>> specs{{"twin_dragon", SystemSpec::complex(0.5, 0.5)},
                                                                     {"rauzy", SystemSpec::complex(rauzy_kappa())}};
  return specs;
}

std::string golden_path(const std::string& name) { return std::string(SAFFINE_GOLDEN_DIR) + "/" + name + ".pgm"; }

Outcome render_goldens() {
  bool ok = true;
  std::string detail;
  for (const auto& [name, spec] : golden_specs()) {
    RasterConfig c = golden_config();
    const std::string chaos = encode_pgm(render_attractor(spec, c));
    std::string stored;
    try {
      stored = read_file(golden_path(name));
    } catch (const Error&) {
      stored.clear();
    }
    const bool same = !stored.empty() && stored == chaos;
    c.method = Subdivision{64};
    const double agree = occupancy_agreement(decode_pgm(chaos), render_attractor(spec, c));
    ok = ok && same && agree >= 0.99;
    detail += name + (stored.empty() ? " golden missing" : same ? " golden match" : " golden DIFFERS") + ", agreement " +
              fmt(100.0 * agree, 5) + "%; ";
  }
  return {ok, detail};
}

int write_goldens() {
  for (const auto& [name, spec] : golden_specs()) {
    write_file(golden_path(name), encode_pgm(render_attractor(spec, golden_config())));
    std::cout << "wrote " << golden_path(name) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--write-goldens") == 0) return write_goldens();

  const std::vector<std::tuple<std::string, std::string, std::function<Outcome()>>> criteria{
      {"1", "expansion round-trip", expansion_round_trip},
      {"2a", "jordan threshold", jordan_threshold},
      {"2b", "mixed corollary grid", mixed_grid},
      {"3", "komornik-loreti constant", komornik_loreti_constant},
      {"4", "rauzy dimension", rauzy_dimension},
      {"5", "rational hull counts", rational_hull_counts},
      {"6", "hull containment", hull_containment},
      {"7", "minkowski identity", minkowski_identity},
      {"8", "membership certificates", membership},
      {"9", "uniqueness certificates", uniqueness_certificates},
      {"10", "classification table", classification_table},
      {"11", "render goldens", render_goldens}};

  int failed = 0;
  for (const auto& [id, name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << ' ' << name << " | " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << '/' << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
