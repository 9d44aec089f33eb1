#pragma once

// Command-line front end. `run` is kept separate from main() so tests can
// drive it with their own streams.

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "saffine/saffine.hpp"

namespace saffine::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;
inline constexpr int kExitUsage = 64;

struct Options {
  std::string case_name;
  std::optional<double> lambda, mu, nu, re, im, rho, beta;
  std::string angle;  // "p/q"

  std::string out;
  std::string verify;
  unsigned threads = 0;

  // render
  int size = 512;
  std::optional<int> width, height;
  std::string method = "chaos";
  std::uint64_t iterations = 10'000'000;
  std::uint64_t seed = 1;
  std::uint64_t burn_in = 100;
  int depth = 24;
  std::string viewport;
  std::string fit = "bounds";
  std::string overlay = "none";

  // hull
  double eps = -1.0;
  std::string format = "json";

  // interior-cert / expand
  std::string poly;
  double x = 0.0, y = 0.0;
  int steps = 400;
  double stop_tol = 1e-9;

  // decide / scan
  int max_depth = 40;
  std::string k0 = "hull";
  double tolerance = 1e-9;
  std::string rect = "0.2,0.99,0.2,0.99";
  int res = 32;
  std::optional<int> nx, ny;
  std::string certs_dir;

  // uniqueness
  int max_L = 24;
  int max_k = 12;
  std::size_t window = 512;
};

inline unsigned env_threads() {
  if (const char* s = std::getenv("SAFFINE_THREADS")) {
    try {
      const long v = std::stol(s);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return 0;
}

inline std::vector<double> parse_list(const std::string& s, std::size_t expect, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Parse, std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  if (expect && v.size() != expect)
    throw Error(ErrorKind::Parse, std::string(what) + " needs " + std::to_string(expect) + " comma-separated numbers");
  return v;
}

inline std::pair<int, int> parse_angle(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) throw Error(ErrorKind::Parse, "angle must be written p/q");
  try {
    return {std::stoi(s.substr(0, slash)), std::stoi(s.substr(slash + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "angle must be written p/q");
  }
}

inline double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw Error(ErrorKind::InvalidArgument, std::string("missing ") + flag);
  return *v;
}

inline SystemSpec build_spec(const Options& o) {
  std::string c = o.case_name;
  if (c.empty()) {
    if (!o.angle.empty() || o.re || o.im) c = "complex";
    else if (o.nu) c = "jordan";
    else throw Error(ErrorKind::InvalidArgument, "missing --case");
  }
  if (c == "positive") return SystemSpec::positive_real(need(o.lambda, "--lambda"), need(o.mu, "--mu"));
  if (c == "mixed") return SystemSpec::mixed_real(need(o.lambda, "--lambda"), need(o.mu, "--mu"));
  if (c == "jordan") return SystemSpec::jordan(need(o.nu, "--nu"));
  if (c == "complex") {
    if (!o.angle.empty()) {
      const auto [p, q] = parse_angle(o.angle);
      return SystemSpec::complex(std::polar(need(o.rho, "--rho"), 2.0 * std::numbers::pi * p / q));
    }
    return SystemSpec::complex(need(o.re, "--re"), need(o.im, "--im"));
  }
  throw Error(ErrorKind::InvalidArgument, "unknown case '" + c + "'");
}

inline void emit(const Json& j, const Options& o, std::ostream& out) {
  if (o.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_file(o.out, j.dump(2) + "\n");
  }
}

inline bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

// ---------------------------------------------------------------------------

inline int cmd_render(const Options& o, std::ostream& out) {
  const SystemSpec spec = build_spec(o);
  RasterConfig cfg;
  cfg.width = o.width.value_or(o.size);
  cfg.height = o.height.value_or(o.size);
  cfg.threads = o.threads;
  if (!o.viewport.empty()) {
    const auto v = parse_list(o.viewport, 4, "--viewport");
    cfg.viewport = Viewport{v[0], v[1], v[2], v[3]};
  } else if (o.fit == "hull") {
    cfg.viewport = hull_viewport(spec);
  } else if (o.fit != "bounds") {
    throw Error(ErrorKind::InvalidArgument, "--fit must be bounds or hull");
  }
  if (o.method == "chaos") cfg.method = ChaosGame{o.iterations, o.seed, o.burn_in};
  else if (o.method == "subdivision") cfg.method = Subdivision{o.depth};
  else throw Error(ErrorKind::InvalidArgument, "--method must be chaos or subdivision");
  if (o.out.empty()) throw Error(ErrorKind::InvalidArgument, "render needs --out");

  const Image img = render_attractor(spec, cfg);
  std::optional<Image> overlay;
  Json extra;
  if (o.overlay == "uniqueness") {
    const UniquenessCertificate cert = certify_uniqueness(spec);
    overlay = render_overlay_uniqueness(spec, cert, cfg);
    extra = to_json(cert);
  } else if (o.overlay.rfind("avoid:", 0) == 0) {
    std::vector<Word> forbidden;
    std::stringstream ss(o.overlay.substr(6));
    std::string item;
    while (std::getline(ss, item, ',')) forbidden.push_back(Word::parse(item));
    overlay = render_overlay_avoiding(spec, forbidden, cfg);
  } else if (o.overlay != "none") {
    throw Error(ErrorKind::InvalidArgument, "--overlay must be none, uniqueness or avoid:w1,w2,...");
  }

  std::string overlay_path;
  if (has_suffix(o.out, ".png")) {
    write_file(o.out, overlay ? encode_overlay_png(img, *overlay) : encode_png(img));
  } else {
    write_file(o.out, encode_pgm(img));
    if (overlay) {
      // second greyscale file next to the first
      const std::filesystem::path p(o.out);
      overlay_path = (p.parent_path() / (p.stem().string() + ".overlay.pgm")).string();
      write_file(overlay_path, encode_pgm(*overlay));
    }
  }
  Json j{{"out", o.out}, {"width", img.width}, {"height", img.height}, {"occupied", img.occupied()}};
  if (!overlay_path.empty()) j["overlay"] = overlay_path;
  if (!extra.is_null()) j["overlay_certificate"] = extra;
  out << j.dump(2) << '\n';
  return kExitOk;
}

inline int cmd_hull(const Options& o, std::ostream& out) {
  const SystemSpec spec = build_spec(o);
  AddressedHull h;
  if (!o.angle.empty()) {
    const auto [p, q] = parse_angle(o.angle);
    h = hull_complex_rational_addressed(need(o.rho, "--rho"), p, q, o.eps);
  } else {
    h = hull_of_addressed(spec, o.eps);
  }
  std::string text;
  if (o.format == "csv") text = polygon_csv(h.polygon);
  else if (o.format == "json") {
    Json j{{"type", "hull"}, {"spec", to_json(spec)}};
    j.update(to_json(h));
    text = j.dump(2) + "\n";
  } else {
    throw Error(ErrorKind::InvalidArgument, "--format must be json or csv");
  }
  if (o.out.empty()) out << text;
  else write_file(o.out, text);
  return kExitOk;
}

inline InteriorCertificate make_certificate(const Options& o) {
  const SystemSpec spec = build_spec(o);
  const ToolPolynomial poly = o.poly.empty() ? default_tool_polynomial(spec) : ToolPolynomial{parse_list(o.poly, 0, "--poly")};
  return interior_radius(spec, poly);
}

inline int cmd_interior(const Options& o, std::ostream& out) {
  emit(to_json(make_certificate(o)), o, out);
  return kExitOk;
}

inline int cmd_expand(const Options& o, std::ostream& out) {
  const InteriorCertificate cert = make_certificate(o);
  const ExpansionRun run = expand_point(cert, {o.x, o.y}, o.steps, o.stop_tol);
  emit(to_json(run, cert), o, out);
  return kExitOk;
}

inline MembershipOptions membership_options(const Options& o) {
  MembershipOptions m;
  m.tolerance = o.tolerance;
  if (o.k0 == "hull") m.initial = InitialSet::Hull;
  else if (o.k0 == "bounds") m.initial = InitialSet::BoundingSet;
  else throw Error(ErrorKind::InvalidArgument, "--k0 must be hull or bounds");
  return m;
}

inline int cmd_decide(const Options& o, std::ostream& out) {
  const SystemSpec spec = build_spec(o);
  const MembershipVerdict v = decide_point(spec, {o.x, o.y}, o.max_depth, membership_options(o));
  emit(to_json(v, spec, {o.x, o.y}, o.max_depth), o, out);
  return v.out() ? kExitNegative : kExitOk;
}

inline int cmd_scan(const Options& o, std::ostream& out, std::ostream& err) {
  CaseKind kind;
  if (o.case_name == "mixed" || o.case_name.empty()) kind = CaseKind::MixedReal;
  else if (o.case_name == "jordan") kind = CaseKind::Jordan;
  else throw Error(ErrorKind::InvalidArgument, "scan supports --case mixed or jordan");
  const auto r = parse_list(o.rect, 0, "--rect");
  if (r.size() != 4 && !(kind == CaseKind::Jordan && r.size() == 2))
    throw Error(ErrorKind::Parse, "--rect needs x0,x1,y0,y1 (or x0,x1 for jordan)");
  const ScanRect rect{r[0], r[1], r.size() == 4 ? r[2] : 0.0, r.size() == 4 ? r[3] : 0.0};
  const int nx = o.nx.value_or(o.res), ny = o.ny.value_or(o.res);
  const RegionScan scan = scan_region(kind, rect, nx, ny, o.max_depth, o.threads, membership_options(o));

  if (!o.certs_dir.empty()) {
    std::filesystem::create_directories(o.certs_dir);
    for (const auto& c : scan.cells) {
      Json j;
      if (c.interior) j = to_json(*c.interior);
      else if (c.membership)
        j = to_json(*c.membership, kind == CaseKind::Jordan ? SystemSpec::jordan(c.lambda) : SystemSpec::mixed_real(c.lambda, c.mu),
                    {0.0, 0.0}, scan.max_depth);
      else continue;
      write_file((std::filesystem::path(o.certs_dir) / (c.certificate_id + ".json")).string(), j.dump(2) + "\n");
    }
  }
  if (o.out.empty()) {
    out << scan.csv();
  } else {
    write_file(o.out, scan.csv());
    out << Json{{"out", o.out},
                {"certified_in", scan.count(CellVerdict::CertifiedIn)},
                {"certified_out", scan.count(CellVerdict::CertifiedOut)},
                {"unknown", scan.count(CellVerdict::Unknown)}}
               .dump(2)
        << '\n';
  }
  err << "scan: " << scan.cells.size() << " cells done\n";
  return kExitOk;
}

inline int cmd_uniqueness(const Options& o, std::ostream& out) {
  const SystemSpec spec = build_spec(o);
  emit(to_json(certify_uniqueness(spec, SearchBounds{o.max_L, o.max_k, o.window})), o, out);
  return kExitOk;
}

inline int cmd_classify(const Options& o, std::ostream& out) {
  Json j;
  if (!o.angle.empty()) {
    const auto [p, q] = parse_angle(o.angle);
    j = to_json(classify_rational(need(o.rho, "--rho"), p, q));
  } else if (o.beta) {
    j = to_json(classify_beta(*o.beta));
  } else if (o.case_name == "mixed" && o.lambda) {
    if (o.mu && *o.mu != *o.lambda) throw Error(ErrorKind::InvalidArgument, "classify needs lambda = mu for the mixed case");
    j = to_json(classify_mixed_equal(*o.lambda));
  } else {
    throw Error(ErrorKind::InvalidArgument, "classify needs --rho with --angle, --beta, or --case mixed --lambda");
  }
  emit(j, o, out);
  return kExitOk;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
  const Json j = Json::parse(read_file(o.verify));
  const VerifyResult r = verify_json(j);
  out << Json{{"verified", r.ok}, {"type", j.value("type", std::string{})}, {"message", r.message}}.dump(2) << '\n';
  return r.ok ? kExitOk : kExitNegative;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Two-map self-affine attractors: render, hulls, interior and uniqueness certificates", "saffine"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_config("--config", "", "flat key = value file; flags on the command line win");
  app.require_subcommand(1, 1);

  Options o;
  o.threads = env_threads();

  app.add_option("--case", o.case_name, "positive | mixed | jordan | complex")
      ->check(CLI::IsMember({"positive", "mixed", "jordan", "complex"}));
  app.add_option("--lambda", o.lambda);
  app.add_option("--mu", o.mu);
  app.add_option("--nu", o.nu);
  app.add_option("--re", o.re, "real part of kappa (irrational-declared pipeline)");
  app.add_option("--im", o.im, "imaginary part of kappa");
  app.add_option("--rho", o.rho, "modulus of kappa");
  app.add_option("--angle", o.angle, "rational angle p/q; kappa = rho exp(2 pi i p/q)");
  app.add_option("--beta", o.beta, "classify: one-dimensional base");
  app.add_option("--out", o.out, "output file");
  app.add_option("--verify", o.verify, "re-verify a JSON certificate instead of computing");
  app.add_option("--threads", o.threads, "worker cap; default from SAFFINE_THREADS or all cores");

  app.add_option("--size", o.size, "raster width and height");
  app.add_option("--width", o.width);
  app.add_option("--height", o.height);
  app.add_option("--method", o.method, "chaos | subdivision");
  app.add_option("--iterations", o.iterations);
  app.add_option("--seed", o.seed);
  app.add_option("--burn-in", o.burn_in);
  app.add_option("--depth", o.depth, "subdivision depth");
  app.add_option("--viewport", o.viewport, "x0,y0,x1,y1");
  app.add_option("--fit", o.fit, "bounds | hull (viewport when --viewport is absent)");
  app.add_option("--overlay", o.overlay, "none | uniqueness | avoid:w1,w2,...");

  app.add_option("--eps", o.eps, "hull tolerance; negative selects the default");
  app.add_option("--format", o.format, "json | csv");

  app.add_option("--poly", o.poly, "tool polynomial coefficients b0,b1,...");
  app.add_option("--x", o.x);
  app.add_option("--y", o.y);
  app.add_option("--steps", o.steps);
  app.add_option("--stop-tol", o.stop_tol, "stop once the reprojection error is below this");

  app.add_option("--max-depth", o.max_depth);
  app.add_option("--k0", o.k0, "hull | bounds");
  app.add_option("--tolerance", o.tolerance);
  app.add_option("--rect", o.rect, "x0,x1,y0,y1");
  app.add_option("--res", o.res, "grid resolution per axis");
  app.add_option("--nx", o.nx);
  app.add_option("--ny", o.ny);
  app.add_option("--certs-dir", o.certs_dir, "write per-cell certificates here");

  app.add_option("--max-L", o.max_L);
  app.add_option("--max-k", o.max_k);
  app.add_option("--window", o.window);

  const std::vector<std::pair<std::string, std::string>> subs{
      {"render", "rasterize the attractor to PGM or PNG"},
      {"hull", "convex hull with vertex addresses"},
      {"interior-cert", "interior certificate (mixed or jordan)"},
      {"expand", "digit expansion of a target point"},
      {"decide", "membership of a point"},
      {"scan", "parameter-region scan to CSV"},
      {"uniqueness", "uniqueness certificate"},
      {"classify", "classification of the set of uniqueness"}};
  for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    if (!o.verify.empty()) return cmd_verify(o, out);
    if (cmd == "render") return cmd_render(o, out);
    if (cmd == "hull") return cmd_hull(o, out);
    if (cmd == "interior-cert") return cmd_interior(o, out);
    if (cmd == "expand") return cmd_expand(o, out);
    if (cmd == "decide") return cmd_decide(o, out);
    if (cmd == "scan") return cmd_scan(o, out, err);
    if (cmd == "uniqueness") return cmd_uniqueness(o, out);
    if (cmd == "classify") return cmd_classify(o, out);
  } catch (const Error& e) {
    err << "saffine " << cmd << ": " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::SearchExhausted:
      case ErrorKind::ConditionsFailed:
      case ErrorKind::CoefficientSumExceeded:
        return kExitNegative;
      default:
        return kExitError;
    }
  } catch (const std::exception& e) {
    err << "saffine " << cmd << ": " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace saffine::cli
