#pragma once

// Interior certificates for real-spectrum systems.
//
// A monic polynomial P(x) = x^n + b_{n-1} x^{n-1} + ... + b_0 that vanishes to the
// right order at every reciprocal eigenvalue, with sum |b_j| <= 2, drives a greedy
// +-1 digit loop whose residuals u_j = a_j - sum_k b_k u_{j+k-n} never leave [-1, 1].
// The initial residuals u_{-n}..u_{-1} are tied to the target point by the matrix B
// of partial-sum polynomials B_t(y) = sum_{k<=t} b_k y^{t-k} and their scaled
// derivatives, so every point in a small box around the origin receives an address.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "saffine/error.hpp"
#include "saffine/system.hpp"

namespace saffine {

/// Monic polynomial x^n + b_{n-1} x^{n-1} + ... + b_0 with coeffs = {b_0, ..., b_{n-1}}.
struct ToolPolynomial {
  std::vector<double> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()); }

  double coefficient_sum() const {
    double s = 0.0;
    for (double b : coeffs) s += std::abs(b);
    return s;
  }

  /// Coefficient of x^k, including the leading 1.
  double coefficient(int k) const { return k == degree() ? 1.0 : coeffs[static_cast<std::size_t>(k)]; }

  /// s-th derivative of P at x.
  double derivative(int s, double x) const {
    double total = 0.0;
    for (int k = s; k <= degree(); ++k) {
      double falling = 1.0;
      for (int r = 0; r < s; ++r) falling *= static_cast<double>(k - r);
      total += coefficient(k) * falling * std::pow(x, k - s);
    }
    return total;
  }

  /// Sum of |terms| of the s-th derivative at x; the scale for relative residuals.
  double derivative_magnitude(int s, double x) const {
    double total = 0.0;
    for (int k = s; k <= degree(); ++k) {
      double falling = 1.0;
      for (int r = 0; r < s; ++r) falling *= static_cast<double>(k - r);
      total += std::abs(coefficient(k) * falling * std::pow(x, k - s));
    }
    return total;
  }
};

/// Sum |b_j| above this is rejected. Boundary parameters such as lambda = mu = 1/sqrt(2)
/// land on 2 up to a few ulps.
inline constexpr double kCoefficientSumLimit = 2.0 + 1e-12;

inline ToolPolynomial mixed_real_poly(double lambda, double mu) {
  if (!(lambda > 0.0 && lambda < 1.0 && mu > 0.0 && mu < 1.0))
    throw Error(ErrorKind::InvalidArgument, "mixed_real_poly needs 0 < lambda, mu < 1");
  ToolPolynomial p{{-1.0 / (mu * lambda), 1.0 / lambda - 1.0 / mu}};
  if (p.coefficient_sum() > kCoefficientSumLimit)
    throw Error(ErrorKind::CoefficientSumExceeded,
                "sum |b_j| = " + std::to_string(p.coefficient_sum()) + " > 2");
  return p;
}

/// x^8 - 8/(7 nu) x^7 + 1/(7 nu^8): double root at 1/nu.
inline ToolPolynomial jordan_poly(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) throw Error(ErrorKind::InvalidArgument, "jordan_poly needs 0 < nu < 1");
  ToolPolynomial p;
  p.coeffs.assign(8, 0.0);
  p.coeffs[0] = 1.0 / (7.0 * std::pow(nu, 8));
  p.coeffs[7] = -8.0 / (7.0 * nu);
  if (p.coefficient_sum() > kCoefficientSumLimit)
    throw Error(ErrorKind::CoefficientSumExceeded,
                "sum |b_j| = " + std::to_string(p.coefficient_sum()) + " > 2");
  return p;
}

/// Eigenvalue with the size of its Jordan block.
struct EigenBlock {
  double eigenvalue;
  int size;
};

/// Blocks in the order the projection coordinates use them.
inline std::vector<EigenBlock> eigen_blocks(const SystemSpec& spec) {
  switch (spec.kind()) {
    case CaseKind::PositiveReal: {
      const auto& c = spec.as<PositiveReal>();
      return {{c.lambda, 1}, {c.mu, 1}};
    }
    case CaseKind::MixedReal: {
      const auto& c = spec.as<MixedReal>();
      return {{-c.lambda, 1}, {c.mu, 1}};
    }
    case CaseKind::Jordan: return {{spec.as<Jordan>().nu, 2}};
    case CaseKind::Complex: break;
  }
  throw Error(ErrorKind::InvalidArgument, "interior certificates need a real spectrum");
}

/// N x n matrix of B_t^{(s)}(lambda_i); within a block the highest derivative comes first.
inline Eigen::MatrixXd build_B_matrix(const SystemSpec& spec, const ToolPolynomial& poly) {
  const auto blocks = eigen_blocks(spec);
  const int n = poly.degree();
  const int dim = std::accumulate(blocks.begin(), blocks.end(), 0,
                                  [](int acc, const EigenBlock& b) { return acc + b.size; });
  Eigen::MatrixXd b(dim, n);
  int row = 0;
  for (const auto& blk : blocks) {
    for (int s = blk.size - 1; s >= 0; --s, ++row) {
      for (int t = 0; t < n; ++t) {
        // (1/s!) d^s/dy^s y^(t-k) = C(t-k, s) y^(t-k-s)
        double v = 0.0;
        for (int k = 0; k <= t; ++k) {
          const int e = t - k;
          if (e < s) continue;
          double binom = 1.0;
          for (int r = 0; r < s; ++r) binom = binom * static_cast<double>(e - r) / static_cast<double>(r + 1);
          v += poly.coeffs[static_cast<std::size_t>(k)] * binom * std::pow(blk.eigenvalue, e - s);
        }
        b(row, t) = v;
      }
    }
  }
  return b;
}

namespace detail {

inline double smallest_singular(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& b, const std::vector<int>& cols) {
  Eigen::MatrixXd s(b.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) s.col(static_cast<Eigen::Index>(j)) = b.col(cols[j]);
  return s;
}

/// Greedy pivots from a column-pivoted QR, then single swaps while the smallest
/// singular value of the square submatrix improves.
inline std::vector<int> choose_columns(const Eigen::MatrixXd& b) {
  const auto dim = static_cast<int>(b.rows());
  const auto n = static_cast<int>(b.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
  const auto perm = qr.colsPermutation().indices();
  std::vector<int> cols;
  for (int j = 0; j < dim && j < n; ++j) cols.push_back(perm(j));
  double best = smallest_singular(select_columns(b, cols));
  for (bool improved = true; improved;) {
    improved = false;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      for (int c = 0; c < n; ++c) {
        if (std::find(cols.begin(), cols.end(), c) != cols.end()) continue;
        auto trial = cols;
        trial[i] = c;
        const double s = smallest_singular(select_columns(b, trial));
        if (s > best * (1.0 + 1e-12)) {
          best = s;
          cols = trial;
          improved = true;
        }
      }
    }
  }
  std::sort(cols.begin(), cols.end());
  return cols;
}

}  // namespace detail

struct ConditionReport {
  double root_residual = 0.0;     // max relative |P^{(s)}(1/lambda_i)| over required (i, s)
  double coefficient_sum = 0.0;   // sum |b_j|
  std::vector<int> columns;       // chosen N x N submatrix of B
  double sigma_min = 0.0;         // its smallest singular value
  double condition_estimate = 0.0;
  bool roots_ok = false;
  bool sum_ok = false;
  bool submatrix_ok = false;

  bool passed() const { return roots_ok && sum_ok && submatrix_ok; }
};

inline constexpr double kRootTolerance = 1e-8;

inline ConditionReport check_tool_conditions(const SystemSpec& spec, const ToolPolynomial& poly) {
  ConditionReport r;
  const auto blocks = eigen_blocks(spec);
  int dim = 0;
  for (const auto& blk : blocks) {
    dim += blk.size;
    const double x = 1.0 / blk.eigenvalue;
    for (int s = 0; s < blk.size; ++s) {
      const double scale = std::max(poly.derivative_magnitude(s, x), 1e-300);
      r.root_residual = std::max(r.root_residual, std::abs(poly.derivative(s, x)) / scale);
    }
  }
  r.roots_ok = r.root_residual <= kRootTolerance;
  r.coefficient_sum = poly.coefficient_sum();
  r.sum_ok = r.coefficient_sum <= kCoefficientSumLimit;
  if (poly.degree() >= dim) {
    const Eigen::MatrixXd b = build_B_matrix(spec, poly);
    r.columns = detail::choose_columns(b);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::select_columns(b, r.columns));
    const auto& sv = svd.singularValues();
    r.sigma_min = sv(sv.size() - 1);
    r.condition_estimate = r.sigma_min > 0.0 ? sv(0) / r.sigma_min : std::numeric_limits<double>::infinity();
    r.submatrix_ok = r.sigma_min > 1e-12 * std::max(1.0, sv(0));
  }
  return r;
}

struct InteriorCertificate {
  SystemSpec spec;
  ToolPolynomial poly;
  double delta = 0.0;               // every target with max |x_i| < delta is representable
  std::vector<int> submatrix_columns;
  ConditionReport margins;
  double rate = 0.0;                // reprojection error <= constant * rate^steps
  double constant = 0.0;
};

/// Reprojection rate and constant: the tail pi(a_T a_{T+1} ...) equals B u for a
/// residual window with |u_j| <= 1, so its norm is at most the sum of column norms
/// of B, and ||M^T|| <= cond * rate^T in an adapted norm.
inline void reprojection_constants(const SystemSpec& spec, const Eigen::MatrixXd& b, double& rate, double& constant) {
  double col_sum = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) col_sum += b.col(j).norm();
  if (spec.is<Jordan>()) {
    const double eps = 0.5 * (1.0 - spec.as<Jordan>().nu);
    rate = spec.as<Jordan>().nu + eps;
    constant = col_sum / eps;  // ||diag(1, eps)|| * ||diag(1, 1/eps)||
  } else {
    rate = spec.spectral_radius();
    constant = col_sum;
  }
}

/// delta = sigma_min(S) / sqrt(N) for the chosen square submatrix S: if every
/// |x_i| < delta then |x|_2 < sigma_min, so the solution of S u = x has |u|_inf <= 1.
inline InteriorCertificate interior_radius(const SystemSpec& spec, const ToolPolynomial& poly) {
  const ConditionReport report = check_tool_conditions(spec, poly);
  if (!report.passed()) {
    std::string why;
    if (!report.roots_ok) why += " root conditions (residual " + std::to_string(report.root_residual) + ")";
    if (!report.sum_ok) why += " coefficient sum " + std::to_string(report.coefficient_sum) + " > 2";
    if (!report.submatrix_ok) why += " no non-singular submatrix";
    throw Error(ErrorKind::ConditionsFailed, "tool conditions failed:" + why);
  }
  InteriorCertificate cert{spec, poly, 0.0, report.columns, report, 0.0, 0.0};
  const auto dim = static_cast<double>(report.columns.size());
  cert.delta = report.sigma_min / std::sqrt(dim);
  reprojection_constants(spec, build_B_matrix(spec, poly), cert.rate, cert.constant);
  return cert;
}

struct ExpansionRun {
  Vec2 target;
  std::vector<double> initial_residuals;  // u_{-n} .. u_{-1}
  Word digits;                            // a_0 .. a_{T-1}
  std::vector<double> residual_trace;     // u_0 .. u_{T-1}
  double max_residual = 0.0;              // max |u_j| over initial and trace
  double error_estimate = 0.0;            // |M^T B (u_{T-n} .. u_{T-1})|, exact up to rounding
};

inline constexpr double kResidualSlack = 1e-12;

/// Greedy digit loop. Runs `steps` digits, or stops early once the a-posteriori
/// truncation error drops to `stop_tolerance` (when positive).
inline ExpansionRun expand_point(const InteriorCertificate& cert, const Vec2& target, int steps,
                                 double stop_tolerance = 0.0) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
  if (!(std::abs(target.x) < cert.delta && std::abs(target.y) < cert.delta))
    throw Error(ErrorKind::TargetOutsideDelta, "target lies outside the certified delta box");

  const SystemSpec& spec = cert.spec;
  const auto& b = cert.poly.coeffs;
  const int n = cert.poly.degree();
  const Eigen::MatrixXd bm = build_B_matrix(spec, cert.poly);
  const Eigen::MatrixXd sub = detail::select_columns(bm, cert.submatrix_columns);

  ExpansionRun run;
  run.target = target;
  const Eigen::Vector2d rhs(target.x, target.y);
  const Eigen::VectorXd sol = sub.fullPivLu().solve(rhs);
  std::vector<double> u(static_cast<std::size_t>(n), 0.0);
  for (std::size_t j = 0; j < cert.submatrix_columns.size(); ++j)
    u[static_cast<std::size_t>(cert.submatrix_columns[j])] = sol(static_cast<Eigen::Index>(j));
  run.initial_residuals = u;
  for (double v : u) run.max_residual = std::max(run.max_residual, std::abs(v));
  if (run.max_residual > 1.0 + kResidualSlack)
    throw Error(ErrorKind::ResidualEscape, "initial residuals exceed 1");

  // window holds u_{j-n} .. u_{j-1}
  std::vector<double> window = u;
  const Mat2 m = spec.linear();
  Mat2 mpow = Mat2::identity();
  Eigen::VectorXd uw(n);
  for (int j = 0; j < steps; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += b[static_cast<std::size_t>(k)] * window[static_cast<std::size_t>(k)];
    const Digit a = s >= 0.0 ? Digit::p : Digit::m;
    const double uj = static_cast<double>(value(a)) - s;
    if (std::abs(uj) > 1.0 + kResidualSlack)
      throw Error(ErrorKind::ResidualEscape, "residual left [-1, 1] at step " + std::to_string(j));
    run.digits.push_back(a);
    run.residual_trace.push_back(uj);
    run.max_residual = std::max(run.max_residual, std::abs(uj));
    window.erase(window.begin());
    window.push_back(uj);
    mpow = mpow * m;

    for (int k = 0; k < n; ++k) uw(k) = window[static_cast<std::size_t>(k)];
    const Eigen::VectorXd tail = bm * uw;
    run.error_estimate = (mpow * Vec2{tail(0), tail(1)}).norm();
    if (stop_tolerance > 0.0 && run.error_estimate <= stop_tolerance) break;
  }
  return run;
}

/// Convenience overload: certifies first.
inline ExpansionRun expand_point(const SystemSpec& spec, const ToolPolynomial& poly, const Vec2& target, int steps,
                                 double stop_tolerance = 0.0) {
  return expand_point(interior_radius(spec, poly), target, steps, stop_tolerance);
}

/// Shipped polynomial for the spec (mixed real or Jordan); throws otherwise.
inline ToolPolynomial default_tool_polynomial(const SystemSpec& spec) {
  if (spec.is<MixedReal>()) return mixed_real_poly(spec.as<MixedReal>().lambda, spec.as<MixedReal>().mu);
  if (spec.is<Jordan>()) return jordan_poly(spec.as<Jordan>().nu);
  throw Error(ErrorKind::InvalidArgument, "no shipped tool polynomial for " + spec.describe());
}

}  // namespace saffine
