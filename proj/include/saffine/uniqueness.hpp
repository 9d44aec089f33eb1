#pragma once

// Points with a unique address.
//
// Words u = a_1..a_l, v = b_1..b_k, w = c_1..c_n generate a language of unique
// addresses {uv, uw}^* when, for every suffix position, the cylinder of the
// remaining block followed by u misses the cylinder of the flipped first symbol:
//   (1) pi[a_i..a_l v u] vs pi[~a_i]      (2) pi[b_j..b_k u] vs pi[~b_j]
//   (3) pi[a_i..a_l w u] vs pi[~a_i]      (4) pi[c_j..c_n u] vs pi[~c_j]
// Disjointness is shown on convex over-approximations F_x(K) with K the hull, refined
// adaptively, so a failure only means "could not separate".

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "saffine/error.hpp"
#include "saffine/hull.hpp"
#include "saffine/system.hpp"

namespace saffine {

inline const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

// ---------------------------------------------------------------------------
// Cylinder separation

struct LemmaOptions {
  double tau = kDefaultTau;            // margins must exceed tau * diam(K)
  int max_refine = 14;                 // extra digits appended while refining a pair
  std::size_t max_pairs = 20000;       // pair budget per separation query
  std::optional<ConvexPolygon> hull;   // K; computed from the spec when absent
};

/// Margin of one separation query: positive lower bound on the distance, or a
/// failure with the refinement depth reached.
struct SeparationResult {
  bool separated = false;
  double margin = 0.0;
  int overlap_depth = 0;
};

class CylinderSeparator {
 public:
  CylinderSeparator(const SystemSpec& spec, LemmaOptions opt = {})
      : spec_(spec), opt_(std::move(opt)) {
    hull_ = opt_.hull ? *opt_.hull : hull_of(spec_);
    diam_ = diameter(hull_);
    threshold_ = opt_.tau * std::max(diam_, 1.0);
  }

  const ConvexPolygon& hull() const { return hull_; }
  double threshold() const { return threshold_; }

  /// Is pi[x] disjoint from pi[y]? Words are refined (longer side first) until all
  /// piece pairs are separated by more than the threshold.
  SeparationResult separate(const Word& x, const Word& y) {
    const std::string key = x.str() + "|" + y.str();
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    SeparationResult r = run(x, y);
    cache_.emplace(key, r);
    return r;
  }

 private:
  struct Piece {
    AffineMap f;
    int extra;
  };

  SeparationResult run(const Word& x, const Word& y) {
    const AffineMap t_m = spec_.map(Digit::m), t_p = spec_.map(Digit::p);
    std::vector<std::pair<Piece, Piece>> stack{{{affine_of_word(spec_, x), 0}, {affine_of_word(spec_, y), 0}}};
    SeparationResult res;
    res.separated = true;
    res.margin = std::numeric_limits<double>::infinity();
    std::size_t pairs = 0;
    while (!stack.empty()) {
      auto [a, b] = stack.back();
      stack.pop_back();
      if (++pairs > opt_.max_pairs) return {false, 0.0, std::max(a.extra, b.extra)};
      const ConvexPolygon pa = transform(hull_, a.f.linear, a.f.offset);
      const ConvexPolygon pb = transform(hull_, b.f.linear, b.f.offset);
      const double s = separation(pa, pb);
      if (s > threshold_) {
        res.margin = std::min(res.margin, s);
        continue;
      }
      const double da = a.f.linear.norm(), db = b.f.linear.norm();
      Piece& split = da >= db ? a : b;
      if (split.extra >= opt_.max_refine) return {false, 0.0, split.extra};
      for (const AffineMap* t : {&t_m, &t_p}) {
        Piece child{split.f.compose(*t), split.extra + 1};
        if (&split == &a) stack.push_back({child, b});
        else stack.push_back({a, child});
      }
    }
    return res;
  }

  SystemSpec spec_;
  LemmaOptions opt_;
  ConvexPolygon hull_;
  double diam_ = 0.0;
  double threshold_ = 0.0;
  std::map<std::string, SeparationResult> cache_;
};

struct LemmaCheck {
  bool passed = false;
  std::array<double, 4> margins{};  // per condition, minimum over suffix positions
  int failed_condition = 0;         // 1..4 when not passed
  std::size_t failed_position = 0;  // 1-based suffix index within the failing condition
  int overlap_depth = 0;
};

namespace detail {

inline Word with_flipped_head(const Word& x) { return Word(1, flip(x[0])); }

/// Conditions for one block: positions of u followed by block then u, and positions of block then u.
inline bool check_block(CylinderSeparator& sep, const Word& u, const Word& block, int cond_u, int cond_b,
                        LemmaCheck& out) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Word x = u.substr(i) + block + u;
    const SeparationResult r = sep.separate(x, with_flipped_head(x));
    if (!r.separated) {
      out.failed_condition = cond_u;
      out.failed_position = i + 1;
      out.overlap_depth = r.overlap_depth;
      return false;
    }
    out.margins[static_cast<std::size_t>(cond_u - 1)] = std::min(out.margins[static_cast<std::size_t>(cond_u - 1)], r.margin);
  }
  for (std::size_t j = 0; j < block.size(); ++j) {
    const Word x = block.substr(j) + u;
    const SeparationResult r = sep.separate(x, with_flipped_head(x));
    if (!r.separated) {
      out.failed_condition = cond_b;
      out.failed_position = j + 1;
      out.overlap_depth = r.overlap_depth;
      return false;
    }
    out.margins[static_cast<std::size_t>(cond_b - 1)] = std::min(out.margins[static_cast<std::size_t>(cond_b - 1)], r.margin);
  }
  return true;
}

}  // namespace detail

/// Non-throwing form; reuses the separator's cache.
inline LemmaCheck try_lemma_conditions(CylinderSeparator& sep, const Word& u, const Word& v, const Word& w) {
  if (u.empty() || v.empty() || w.empty()) throw Error(ErrorKind::InvalidArgument, "u, v, w must be nonempty");
  if (u + v == u + w) throw Error(ErrorKind::InvalidArgument, "uv and uw must differ");
  LemmaCheck out;
  out.margins.fill(std::numeric_limits<double>::infinity());
  if (!detail::check_block(sep, u, v, 1, 2, out)) return out;
  if (!detail::check_block(sep, u, w, 3, 4, out)) return out;
  out.passed = true;
  return out;
}

inline LemmaCheck try_lemma_conditions(const SystemSpec& spec, const Word& u, const Word& v, const Word& w,
                                       const LemmaOptions& opt = {}) {
  CylinderSeparator sep(spec, opt);
  return try_lemma_conditions(sep, u, v, w);
}

/// The four margins; throws CannotSeparate when the over-approximations meet.
inline std::array<double, 4> check_lemma_conditions(const SystemSpec& spec, const Word& u, const Word& v,
                                                    const Word& w, const LemmaOptions& opt = {}) {
  const LemmaCheck c = try_lemma_conditions(spec, u, v, w, opt);
  if (!c.passed)
    throw Error(ErrorKind::CannotSeparate, "condition " + std::to_string(c.failed_condition) + " at position " +
                                               std::to_string(c.failed_position) + ": bounds still overlap after " +
                                               std::to_string(c.overlap_depth) + " refinements");
  return c.margins;
}

// ---------------------------------------------------------------------------
// Codes

/// Sardinas-Patterson test for the two-word code {x, y}.
inline bool is_unambiguous(const Word& x, const Word& y) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidArgument, "code words must be nonempty");
  if (x == y) throw Error(ErrorKind::InvalidArgument, "code words must differ");
  const std::vector<std::string> code{x.str(), y.str()};
  auto dangling = [](const std::string& a, const std::string& b, std::set<std::string>& out) {
    // a is a proper prefix of b: b = a s
    if (a.size() < b.size() && b.compare(0, a.size(), a) == 0) out.insert(b.substr(a.size()));
  };
  std::set<std::string> current;
  for (const auto& a : code)
    for (const auto& b : code)
      if (a != b) dangling(a, b, current);
  std::set<std::set<std::string>> seen;
  while (!current.empty()) {
    if (current.count("")) return false;
    for (const auto& s : current)
      for (const auto& c : code)
        if (s == c) return false;
    if (!seen.insert(current).second) return true;
    std::set<std::string> next;
    for (const auto& s : current)
      for (const auto& c : code) {
        dangling(c, s, next);
        dangling(s, c, next);
      }
    current = std::move(next);
  }
  return true;
}

/// log x for the root x > 1 of x^{-len1} + x^{-len2} = 1.
inline double code_entropy(int len1, int len2) {
  if (len1 < 1 || len2 < 1) throw Error(ErrorKind::InvalidArgument, "lengths must be >= 1");
  auto f = [&](double x) { return std::pow(x, -len1) + std::pow(x, -len2) - 1.0; };
  double lo = 1.0, hi = 2.0;  // f(1) = 1 > 0, f(2) <= 0
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
    if (mid == lo && mid == hi) break;
  }
  return std::log(0.5 * (lo + hi));
}

// ---------------------------------------------------------------------------
// Certificates

struct SearchBounds {
  int max_L = 24;
  int max_k = 12;
  std::size_t window = 512;
};

struct UniquenessCertificate {
  SystemSpec spec;
  Word u, v, w;
  std::array<double, 4> margins{};
  double entropy = 0.0;
  std::optional<double> dim_lower_bound;
  std::string template_name;
};

namespace detail {

/// Negate digits at odd absolute positions, counting from `offset`.
inline Word alternate_from(const Word& w, std::size_t offset) {
  Word out;
  for (std::size_t i = 0; i < w.size(); ++i) out.push_back((offset + i) % 2 == 1 ? flip(w[i]) : w[i]);
  return out;
}

/// Conformal contraction ratio, when the linear part is a similarity.
inline std::optional<double> conformal_ratio(const SystemSpec& spec) {
  if (spec.is<Complex>()) return std::abs(spec.kappa());
  if (spec.is<MixedReal>() && spec.as<MixedReal>().lambda == spec.as<MixedReal>().mu) return spec.as<MixedReal>().lambda;
  return std::nullopt;
}

inline UniquenessCertificate package(const SystemSpec& spec, const Word& u, const Word& v, const Word& w,
                                     const LemmaCheck& c, std::string name) {
  UniquenessCertificate cert{spec, u, v, w, c.margins, code_entropy(static_cast<int>((u + v).size()),
                                                                     static_cast<int>((u + w).size())),
                             std::nullopt, std::move(name)};
  if (auto r = conformal_ratio(spec)) cert.dim_lower_bound = cert.entropy / -std::log(*r);
  return cert;
}

/// u = lead^L (or m p^L), v = p^k1, w = p^k2 over the fixed candidate order.
template <class MakeU, class Accept>
std::optional<UniquenessCertificate> power_template(const SystemSpec& spec, const SearchBounds& b, MakeU make_u,
                                                   Accept accept, const char* name) {
  CylinderSeparator sep(spec);
  for (int L = 1; L <= b.max_L; ++L) {
    const Word u = make_u(L);
    for (int k1 = 1; k1 <= b.max_k; ++k1)
      for (int k2 = k1 + 1; k2 <= b.max_k; ++k2) {
        if (!accept(u, k1, k2)) continue;
        const Word v = power(Digit::p, static_cast<std::size_t>(k1));
        const Word w = power(Digit::p, static_cast<std::size_t>(k2));
        if (!is_unambiguous(u + v, u + w)) continue;
        const LemmaCheck c = try_lemma_conditions(sep, u, v, w);
        if (c.passed) return package(spec, u, v, w, c, name);
      }
  }
  return std::nullopt;
}

inline std::optional<UniquenessCertificate> mixed_template(const SystemSpec& spec, const SearchBounds& b) {
  auto mp = [](int L) { return Digit::m + power(Digit::p, static_cast<std::size_t>(L)); };
  const auto& c = spec.as<MixedReal>();
  if (c.lambda <= c.mu)
    return power_template(spec, b, mp, [](const Word&, int, int) { return true; }, "m p^L | p^k1 | p^k2");

  // lambda > mu: alternating the digits conjugates to MixedReal(mu, lambda) with swapped
  // coordinates. Blocks of even length keep the alternation aligned across concatenation.
  const SystemSpec swapped = SystemSpec::mixed_real(c.mu, c.lambda);
  auto even = [](const Word& u, int k1, int k2) {
    return (u.size() + static_cast<std::size_t>(k1)) % 2 == 0 && (u.size() + static_cast<std::size_t>(k2)) % 2 == 0;
  };
  auto found = power_template(swapped, b, mp, even, "m p^L | p^k1 | p^k2");
  if (!found) return std::nullopt;
  const Word u = alternate_from(found->u, 0);
  const Word v = alternate_from(found->v, found->u.size());
  const Word w = alternate_from(found->w, found->u.size());
  const LemmaCheck chk = try_lemma_conditions(spec, u, v, w);
  if (!chk.passed) return std::nullopt;
  return package(spec, u, v, w, chk, "alternated m p^L | p^k1 | p^k2");
}

inline std::optional<UniquenessCertificate> jordan_template(const SystemSpec& spec, const SearchBounds& b) {
  return power_template(
      spec, b, [](int L) { return power(Digit::m, static_cast<std::size_t>(L)); },
      [](const Word&, int, int) { return true; }, "m^L | p^k1 | p^k2");
}

/// Fixed list of support directions tried for complex specs.
inline std::vector<double> complex_directions() {
  std::vector<double> out;
  for (int k = 0; k < 16; ++k) out.push_back(2.0 * std::numbers::pi * (k + 0.318) / 16.0);
  return out;
}

/// First index >= from where `pat` occurs in `seq`, or npos.
inline std::size_t find_word(const Word& seq, const Word& pat, std::size_t from) {
  for (std::size_t s = from; s + pat.size() <= seq.size(); ++s) {
    bool ok = true;
    for (std::size_t t = 0; t < pat.size() && ok; ++t) ok = seq[s + t] == pat[t];
    if (ok) return s;
  }
  return std::string::npos;
}

/// Words from a recurrent extreme sequence: u = b_1..b_L occurring with both
/// continuations, v and w running from each continuation to the next return of u.
inline std::optional<UniquenessCertificate> complex_template(const SystemSpec& spec, const SearchBounds& b) {
  CylinderSeparator sep(spec);
  const auto kappa = spec.kappa();
  for (double phi : complex_directions()) {
    const ExtremeSequence es = extreme_sequence(kappa, phi, b.window);
    if (!es.tie_positions.empty()) continue;
    const Word& seq = es.digits;
    for (int L = 1; L <= b.max_L; ++L) {
      const auto len = static_cast<std::size_t>(L);
      std::set<std::string> tried;
      for (std::size_t s = 0; s + len < seq.size(); ++s) {
        const Word u = seq.substr(s, len);
        if (!tried.insert(u.str()).second) continue;
        // occurrences followed by each continuation
        std::optional<Word> blocks[2];
        for (std::size_t pos = find_word(seq, u, 0); pos != std::string::npos && (!blocks[0] || !blocks[1]);
             pos = find_word(seq, u, pos + 1)) {
          if (pos + len >= seq.size()) break;
          const int which = seq[pos + len] == Digit::p ? 0 : 1;
          if (blocks[which]) continue;
          const std::size_t ret = find_word(seq, u, pos + len + 1);
          if (ret == std::string::npos) continue;
          blocks[which] = seq.substr(pos + len, ret - (pos + len));
        }
        if (!blocks[0] || !blocks[1]) continue;
        const Word& v = *blocks[0];
        const Word& w = *blocks[1];
        if (!is_unambiguous(u + v, u + w)) continue;
        const LemmaCheck c = try_lemma_conditions(sep, u, v, w);
        if (c.passed) return package(spec, u, v, w, c, "extreme sequence return words");
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Searches the case-specific templates in a fixed order; the first passing triple wins.
inline UniquenessCertificate certify_uniqueness(const SystemSpec& spec, const SearchBounds& bounds = {}) {
  std::optional<UniquenessCertificate> cert;
  switch (spec.kind()) {
    case CaseKind::MixedReal: cert = detail::mixed_template(spec, bounds); break;
    case CaseKind::PositiveReal:
      cert = detail::power_template(
          spec, bounds, [](int L) { return Digit::m + power(Digit::p, static_cast<std::size_t>(L)); },
          [](const Word&, int, int) { return true; }, "m p^L | p^k1 | p^k2");
      break;
    case CaseKind::Jordan: cert = detail::jordan_template(spec, bounds); break;
    case CaseKind::Complex: cert = detail::complex_template(spec, bounds); break;
  }
  if (!cert) throw Error(ErrorKind::SearchExhausted, "no certificate within the search bounds for " + spec.describe());
  return *cert;
}

/// Re-checks a certificate without searching.
inline bool verify_certificate(const UniquenessCertificate& cert, std::string* why = nullptr) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (cert.u.empty() || cert.v.empty() || cert.w.empty() || cert.u + cert.v == cert.u + cert.w)
    return fail("malformed words");
  if (!is_unambiguous(cert.u + cert.v, cert.u + cert.w)) return fail("{uv, uw} is ambiguous");
  const LemmaCheck c = try_lemma_conditions(cert.spec, cert.u, cert.v, cert.w);
  if (!c.passed) return fail("condition " + std::to_string(c.failed_condition) + " could not be separated");
  const double h = code_entropy(static_cast<int>((cert.u + cert.v).size()), static_cast<int>((cert.u + cert.w).size()));
  if (!(h > 0.0) || std::abs(h - cert.entropy) > 1e-9) return fail("entropy mismatch");
  return true;
}

// ---------------------------------------------------------------------------
// Rational angles

/// First n Thue-Morse bits: bit k is the parity of the binary digit sum of k.
inline std::vector<int> thue_morse(std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  std::vector<int> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<int>(std::popcount(k) & 1U);
  return out;
}

/// sum_{n>=1} m_n x^{-n+1} - 1, truncated once the tail bound x^{-N}/(x-1) is below tol.
inline double komornik_loreti_residual(double x, double tol = 1e-13) {
  double sum = 0.0, pw = 1.0;
  std::size_t k = 0;
  while (pw / (x - 1.0) >= tol) {
    sum += static_cast<double>(std::popcount(k) & 1U) * pw;
    pw /= x;
    ++k;
  }
  return sum - 1.0;
}

/// Komornik-Loreti constant, by bisection on (G, 2).
inline double komornik_loreti() {
  double lo = kGolden, hi = 2.0;  // residual decreases in x
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (komornik_loreti_residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

enum class UniquenessClass { FiniteNonEmpty, CountablyInfinite, UncountableZeroDim, PositiveDim };

inline std::string to_string(UniquenessClass c) {
  switch (c) {
    case UniquenessClass::FiniteNonEmpty: return "FiniteNonEmpty";
    case UniquenessClass::CountablyInfinite: return "CountablyInfinite";
    case UniquenessClass::UncountableZeroDim: return "UncountableZeroDim";
    case UniquenessClass::PositiveDim: return "PositiveDim";
  }
  return "?";
}

struct RationalClassification {
  double rho = 0.0;
  int p = 0, q = 0;
  int q_prime = 0;
  double beta = 0.0;
  UniquenessClass cls = UniquenessClass::FiniteNonEmpty;
  bool boundary = false;  // beta within tau of G or beta*; class assigned as if equal
};

/// Class of beta against G and beta*. Values within tau of a threshold are flagged and
/// classified as lying on it.
inline RationalClassification classify_beta(double beta, double tau = kDefaultTau) {
  if (!(beta > 1.0)) throw Error(ErrorKind::InvalidArgument, "beta must exceed 1");
  static const double beta_star = komornik_loreti();
  RationalClassification r;
  r.beta = beta;
  if (std::abs(beta - kGolden) <= tau) {
    r.boundary = true;
    r.cls = UniquenessClass::FiniteNonEmpty;
  } else if (std::abs(beta - beta_star) <= tau) {
    r.boundary = true;
    r.cls = UniquenessClass::UncountableZeroDim;
  } else if (beta < kGolden) {
    r.cls = UniquenessClass::FiniteNonEmpty;
  } else if (beta < beta_star) {
    r.cls = UniquenessClass::CountablyInfinite;
  } else {
    r.cls = UniquenessClass::PositiveDim;
  }
  return r;
}

inline RationalClassification classify_rational(double rho, int p, int q, double tau = kDefaultTau) {
  if (q <= 0 || std::gcd(p, q) != 1) throw Error(ErrorKind::InvalidArgument, "angle p/q must be in lowest terms");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidArgument, "rho must lie in (0, 1)");
  const int qp = q_prime(q);
  RationalClassification r = classify_beta(std::pow(rho, -qp), tau);
  r.rho = rho;
  r.p = p;
  r.q = q;
  r.q_prime = qp;
  return r;
}

enum class MixedEqualGeometry { TotallyDisconnected, Parallelogram };

inline std::string to_string(MixedEqualGeometry g) {
  return g == MixedEqualGeometry::Parallelogram ? "Parallelogram" : "TotallyDisconnected";
}

struct MixedEqualClassification {
  RationalClassification classification;  // beta = lambda^{-2}; p = q = 0
  MixedEqualGeometry geometry = MixedEqualGeometry::Parallelogram;
  bool geometry_boundary = false;
};

/// MixedReal(lambda, lambda). lambda within tau of 1/sqrt(2) counts as the boundary,
/// which belongs to the parallelogram side.
inline MixedEqualClassification classify_mixed_equal(double lambda, double tau = kDefaultTau) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidArgument, "lambda must lie in (0, 1)");
  MixedEqualClassification out;
  out.classification = classify_beta(1.0 / (lambda * lambda), tau);
  out.classification.rho = lambda;
  out.classification.q_prime = 2;
  const double edge = 1.0 / std::numbers::sqrt2;
  out.geometry_boundary = std::abs(lambda - edge) <= tau;
  out.geometry = lambda < edge - tau ? MixedEqualGeometry::TotallyDisconnected : MixedEqualGeometry::Parallelogram;
  return out;
}

/// Complex root of z^3 - z^2 - z - 1 with positive imaginary part, via the companion matrix.
inline std::complex<double> rauzy_kappa() {
  Eigen::Matrix3d c;
  c << 1.0, 1.0, 1.0,
       1.0, 0.0, 0.0,
       0.0, 1.0, 0.0;
  const Eigen::EigenSolver<Eigen::Matrix3d> es(c, false);
  for (int i = 0; i < 3; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (z.imag() > 1e-9) return z;
  }
  throw Error(ErrorKind::Degenerate, "no complex root found");
}

}  // namespace saffine
