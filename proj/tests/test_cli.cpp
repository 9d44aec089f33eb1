#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "saffine_cli.hpp"

namespace fs = std::filesystem;
using saffine::Json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "saffine");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = saffine::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int n = 0;
    path_ = fs::temp_directory_path() / ("saffine-cli-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

}  // namespace

TEST(Cli, ClassifyRational) {
  const Result r = run({"classify", "--rho", "0.7", "--angle", "1/4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["class"], "PositiveDim");
  EXPECT_EQ(j["q_prime"], 2);
}

TEST(Cli, ClassifyMixedEqual) {
  const Result r = run({"classify", "--case", "mixed", "--lambda", "0.75"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(Json::parse(r.out)["geometry"], "Parallelogram");
}

TEST(Cli, InteriorCertificateAndVerify) {
  TempDir dir;
  const std::string cert = dir.file("interior.json");
  const Result r = run({"interior-cert", "--case", "mixed", "--lambda", "0.72", "--mu", "0.95", "--out", cert});
  ASSERT_EQ(r.code, 0) << r.err;
  const Result v = run({"interior-cert", "--verify", cert});
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_TRUE(Json::parse(v.out)["verified"].get<bool>());

  // tamper: shrink the claimed radius past what the conditions allow
  Json j = Json::parse(saffine::read_file(cert));
  j["spec"]["params"]["lambda"] = 0.3;
  saffine::write_file(cert, j.dump());
  EXPECT_EQ(run({"interior-cert", "--verify", cert}).code, 2);
}

TEST(Cli, InteriorCertificateFailsBelowThreshold) {
  const Result r = run({"interior-cert", "--case", "mixed", "--lambda", "0.3", "--mu", "0.4"});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, RenderPgmHeaderAndDeterminism) {
  TempDir dir;
  const std::vector<std::string> base{"render", "--case", "complex", "--re", "0.5", "--im", "0.5", "--size", "64",
                                      "--iterations", "200000", "--seed", "3"};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return a;
  };
  ASSERT_EQ(run(with({"--out", dir.file("a.pgm"), "--threads", "1"})).code, 0);
  ASSERT_EQ(run(with({"--out", dir.file("b.pgm"), "--threads", "2"})).code, 0);
  const std::string a = saffine::read_file(dir.file("a.pgm"));
  EXPECT_EQ(a.substr(0, 13), "P5\n64 64\n255\n");
  EXPECT_EQ(a.size(), 13u + 64u * 64u);
  EXPECT_EQ(a, saffine::read_file(dir.file("b.pgm")));
}

TEST(Cli, RenderOverlayOutputs) {
  TempDir dir;
  const std::vector<std::string> spec{"--case", "mixed", "--lambda", "0.55", "--mu", "0.8", "--size", "48",
                                      "--method", "subdivision", "--overlay", "uniqueness"};
  auto args = spec;
  args.insert(args.begin(), "render");
  args.insert(args.end(), {"--out", dir.file("m.pgm")});
  const Result r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir.file("m.overlay.pgm")));
  EXPECT_EQ(Json::parse(r.out)["overlay"], dir.file("m.overlay.pgm"));

  args.back() = dir.file("m.png");
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(saffine::read_file(dir.file("m.png")).substr(1, 3), "PNG");
}

TEST(Cli, DecideOutExitsTwo) {
  const Result r = run({"decide", "--case", "mixed", "--lambda", "0.3", "--mu", "0.4", "--x", "0", "--y", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(Json::parse(r.out)["verdict"], "out");
  const Result in = run({"decide", "--case", "mixed", "--lambda", "0.72", "--mu", "0.95", "--x", "0.3", "--y", "0.2"});
  EXPECT_EQ(in.code, 0);
  EXPECT_EQ(Json::parse(in.out)["verdict"], "in");
}

TEST(Cli, CertificatesRoundTrip) {
  TempDir dir;
  const std::vector<std::vector<std::string>> cmds{
      {"uniqueness", "--case", "jordan", "--nu", "0.7"},
      {"expand", "--case", "mixed", "--lambda", "0.72", "--mu", "0.95", "--x", "0.1", "--y", "-0.2"},
      {"decide", "--case", "mixed", "--lambda", "0.3", "--mu", "0.4", "--x", "0", "--y", "0"},
      {"hull", "--case", "mixed", "--lambda", "0.55", "--mu", "0.8"},
      {"classify", "--beta", "1.7"}};
  int k = 0;
  for (auto args : cmds) {
    const std::string path = dir.file("c" + std::to_string(k++) + ".json");
    args.insert(args.end(), {"--out", path});
    const Result r = run(args);
    ASSERT_LE(r.code, 2) << args[0] << ": " << r.err;
    const Result v = run({args[0], "--verify", path});
    EXPECT_EQ(v.code, 0) << args[0] << ": " << v.out;
  }
  // a hull missing half its vertices no longer bounds the attractor
  Json h = Json::parse(saffine::read_file(dir.file("c3.json")));
  const auto half = static_cast<std::ptrdiff_t>(h["vertices"].size() / 2);
  h["vertices"].erase(h["vertices"].begin(), h["vertices"].begin() + half);
  h["addresses"].erase(h["addresses"].begin(), h["addresses"].begin() + half);
  saffine::write_file(dir.file("c3.json"), h.dump());
  EXPECT_EQ(run({"hull", "--verify", dir.file("c3.json")}).code, 2);
}

TEST(Cli, ConfigFileWithOverride) {
  TempDir dir;
  const std::string cfg = dir.file("run.ini");
  saffine::write_file(cfg, "case = mixed\nlambda = 0.3\nmu = 0.4\nx = 0\ny = 0\n");
  EXPECT_EQ(run({"decide", "--config", cfg}).code, 2);
  // the command line wins over the file
  EXPECT_EQ(run({"decide", "--config", cfg, "--lambda", "0.72", "--mu", "0.95", "--x", "0.3", "--y", "0.2"}).code, 0);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"frobnicate"}).code, 64);
  EXPECT_EQ(run({"decide", "--x", "abc"}).code, 64);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"decide", "--case", "bogus", "--x", "0", "--y", "0"}).code, 64);
  EXPECT_EQ(run({"decide", "--case", "jordan", "--x", "0", "--y", "0"}).code, 1);  // no --nu
  EXPECT_EQ(run({"classify"}).code, 1);
}

TEST(Cli, ScanCsvIsDeterministic) {
  const std::vector<std::string> args{"scan", "--case", "mixed", "--rect", "0.3,0.95,0.3,0.95", "--res", "4",
                                      "--max-depth", "14"};
  auto a = args, b = args;
  a.insert(a.end(), {"--threads", "1"});
  b.insert(b.end(), {"--threads", "3"});
  const Result ra = run(a), rb = run(b);
  ASSERT_EQ(ra.code, 0) << ra.err;
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(ra.out.substr(0, ra.out.find('\n')), "lambda,mu,verdict,certificate_id");
}
