#pragma once

// Rasterization: chaos game, deterministic subdivision, overlays, PGM/PNG output.

#include <zlib.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include "saffine/error.hpp"
#include "saffine/hull.hpp"
#include "saffine/system.hpp"
#include "saffine/uniqueness.hpp"

namespace saffine {

struct Viewport {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool empty() const { return !(x1 > x0 && y1 > y0); }
};

struct ChaosGame {
  std::uint64_t iterations = 10'000'000;
  std::uint64_t seed = 1;
  std::uint64_t burn_in = 100;
};

struct Subdivision {
  int depth = 24;
};

struct RasterConfig {
  int width = 512;
  int height = 512;
  std::optional<Viewport> viewport;  // default: bounding set inflated by 5%
  std::variant<ChaosGame, Subdivision> method = ChaosGame{};
  unsigned threads = 0;              // 0: hardware concurrency
};

/// 8-bit greyscale image, row 0 at the top (largest y).
struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t occupied() const {
    return static_cast<std::size_t>(std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t v) { return v != 0; }));
  }
  bool operator==(const Image&) const = default;
};

/// Hit counts per pixel, before tone mapping.
struct HitCounts {
  int width = 0, height = 0;
  std::vector<std::uint64_t> counts;
};

/// Coordinate box of the bounding set, grown by `margin` of its size on each side.
inline Viewport default_viewport(const SystemSpec& spec, double margin = 0.05) {
  const BoundingSet k = bounding_set(spec);
  const double hx = k.support({1, 0}), lx = -k.support({-1, 0});
  const double hy = k.support({0, 1}), ly = -k.support({0, -1});
  const double mx = margin * (hx - lx), my = margin * (hy - ly);
  return {lx - mx, ly - my, hx + mx, hy + my};
}

/// Same, from the hull: a tighter frame.
inline Viewport hull_viewport(const SystemSpec& spec, double margin = 0.05) {
  const ConvexPolygon h = hull_of(spec);
  const double hx = support(h, {1, 0}), lx = -support(h, {-1, 0});
  const double hy = support(h, {0, 1}), ly = -support(h, {0, -1});
  const double mx = margin * (hx - lx), my = margin * (hy - ly);
  return {lx - mx, ly - my, hx + mx, hy + my};
}

namespace detail {

struct PixelMap {
  Viewport vp;
  int w, h;
  double sx, sy;

  PixelMap(const Viewport& v, int width, int height)
      : vp(v), w(width), h(height), sx(width / v.width()), sy(height / v.height()) {}

  /// Pixel index or -1 when outside.
  long index(const Vec2& p) const {
    const double fx = (p.x - vp.x0) * sx;
    const double fy = (vp.y1 - p.y) * sy;
    if (!(fx >= 0.0 && fx < w && fy >= 0.0 && fy < h)) return -1;
    return static_cast<long>(fy) * w + static_cast<long>(fx);
  }

  double pixel_size() const { return std::min(vp.width() / w, vp.height() / h); }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline unsigned worker_count(unsigned requested) {
  return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

inline void validate(const RasterConfig& cfg, const Viewport& vp) {
  if (cfg.width <= 0 || cfg.height <= 0) throw Error(ErrorKind::InvalidArgument, "image dimensions must be positive");
  if (vp.empty()) throw Error(ErrorKind::ViewportEmpty, "viewport has no area");
}

}  // namespace detail

inline constexpr std::uint64_t kChaosChunk = 1 << 20;

/// Chaos game in fixed-size chunks. Each chunk has its own generator seeded from
/// (seed, chunk index) and starts at pi(p^inf), so the summed counts do not
/// depend on how chunks are spread over threads.
inline HitCounts chaos_game_counts(const SystemSpec& spec, const RasterConfig& cfg, const ChaosGame& g) {
  const Viewport vp = cfg.viewport.value_or(default_viewport(spec));
  detail::validate(cfg, vp);
  const detail::PixelMap pm(vp, cfg.width, cfg.height);
  const Mat2 m = spec.linear();
  const Vec2 u = spec.translation();
  const Vec2 start = project(spec, EventualAddress{});
  const std::uint64_t chunks = (g.iterations + kChaosChunk - 1) / kChaosChunk;
  const std::size_t npx = static_cast<std::size_t>(cfg.width) * static_cast<std::size_t>(cfg.height);

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(detail::worker_count(cfg.threads), std::max<std::uint64_t>(chunks, 1)));
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(npx, 0));
  std::atomic<std::uint64_t> next{0};
  auto work = [&](unsigned t) {
    auto& counts = partial[t];
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      std::mt19937_64 rng(detail::splitmix64(g.seed ^ detail::splitmix64(c)));
      const std::uint64_t n = std::min(kChaosChunk, g.iterations - c * kChaosChunk);
      Vec2 x = start;
      std::uint64_t bits = 0;
      int left = 0;
      auto step = [&] {
        if (left == 0) {
          bits = rng();
          left = 64;
        }
        const double s = (bits & 1U) ? 1.0 : -1.0;
        bits >>= 1;
        --left;
        x = m * x + u * s;
      };
      for (std::uint64_t i = 0; i < g.burn_in; ++i) step();
      for (std::uint64_t i = 0; i < n; ++i) {
        if (const long idx = pm.index(x); idx >= 0) ++counts[static_cast<std::size_t>(idx)];
        step();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();

  HitCounts out{cfg.width, cfg.height, std::vector<std::uint64_t>(npx, 0)};
  for (const auto& p : partial)
    for (std::size_t i = 0; i < npx; ++i) out.counts[i] += p[i];
  return out;
}

namespace detail {

/// Cylinder tests for the subdivision walks: F_w(A) lies in the disc of radius
/// ||L_w|| R about F_w(pi(p^inf)), with R the hull's reach from pi(p^inf).
/// Leaves are cylinders whose disc is below `leaf` pixels across.
struct CylinderWalk {
  const SystemSpec& spec;
  Viewport vp;
  double pixel;
  double leaf;
  double radius;  // R
  Vec2 anchor;    // pi(p^inf)

  CylinderWalk(const SystemSpec& s, const Viewport& v, double px, double leaf_pixels = 0.25)
      : spec(s), vp(v), pixel(px), leaf(leaf_pixels) {
    anchor = project(spec, EventualAddress{});
    const ConvexPolygon h = hull_of(spec);
    radius = 0.0;
    for (const auto& p : h.vertices) radius = std::max(radius, distance(p, anchor));
    radius += h.slack;
  }

  bool visible(const AffineMap& f) const {
    const double r = f.linear.norm() * radius;
    const Vec2 c = f(anchor);
    return c.x + r >= vp.x0 && c.x - r <= vp.x1 && c.y + r >= vp.y0 && c.y - r <= vp.y1;
  }
  bool small(const AffineMap& f) const { return 2.0 * f.linear.norm() * radius < leaf * pixel; }
};

/// Breadth-first cylinder walk grouped by word length. All words of length n
/// share the linear part M^n, so their cylinders are translates; words whose
/// offsets fall in the same cell of side `cell` (and carry the same tag) are
/// merged and their multiplicities added. Each level is sorted before use, so
/// the result does not depend on the thread count.
struct WalkNode {
  Vec2 c;
  std::uint64_t weight;
  std::uint32_t tag;
};

template <class Expand, class Leaf>
void merged_walk(const SystemSpec& spec, const CylinderWalk& walk, double cell, int max_len, std::uint32_t tag0,
                 unsigned threads, Expand expand, Leaf leaf) {
  const Mat2 m = spec.linear();
  std::vector<Mat2> powers{Mat2::identity()};
  std::map<int, std::vector<WalkNode>> buckets;
  buckets[0].push_back({Vec2{}, 1, tag0});
  const unsigned workers = std::max(1u, threads);

  while (!buckets.empty()) {
    const int n = buckets.begin()->first;
    std::vector<WalkNode> level = std::move(buckets.begin()->second);
    buckets.erase(buckets.begin());
    while (static_cast<int>(powers.size()) <= n) powers.push_back(powers.back() * m);
    const Mat2& ln = powers[static_cast<std::size_t>(n)];

    struct Keyed {
      std::int64_t kx, ky;
      WalkNode node;
    };
    std::vector<Keyed> keyed;
    keyed.reserve(level.size());
    for (const auto& w : level)
      keyed.push_back({static_cast<std::int64_t>(std::floor(w.c.x / cell)), static_cast<std::int64_t>(std::floor(w.c.y / cell)), w});
    level.clear();
    level.shrink_to_fit();
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
      return std::tie(a.kx, a.ky, a.node.tag, a.node.c.x, a.node.c.y) <
             std::tie(b.kx, b.ky, b.node.tag, b.node.c.x, b.node.c.y);
    });
    std::vector<WalkNode> merged;
    for (const auto& k : keyed) {
      if (!merged.empty()) {
        const Keyed& last = keyed[&k - keyed.data() - 1];
        if (last.kx == k.kx && last.ky == k.ky && last.node.tag == k.node.tag) {
          merged.back().weight += k.node.weight;
          continue;
        }
      }
      merged.push_back(k.node);
    }
    keyed.clear();
    keyed.shrink_to_fit();

    const bool at_leaf = n >= max_len || walk.small(AffineMap{ln, Vec2{}});
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(merged.size() / 4096, 1)));
    std::vector<std::map<int, std::vector<WalkNode>>> out(used);
    auto work = [&](unsigned t) {
      const std::size_t lo = merged.size() * t / used, hi = merged.size() * (t + 1) / used;
      auto push = [&](int len, const Vec2& c, std::uint64_t weight, std::uint32_t tag) {
        out[t][n + len].push_back({c, weight, tag});
      };
      for (std::size_t i = lo; i < hi; ++i) {
        const AffineMap f{ln, merged[i].c};
        if (!walk.visible(f)) continue;
        if (at_leaf) leaf(t, f, merged[i]);
        else expand(f, merged[i], push);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < used; ++t) pool.emplace_back(work, t);
    work(0);
    for (auto& th : pool) th.join();
    for (auto& o : out)
      for (auto& [len, nodes] : o) {
        auto& dst = buckets[len];
        dst.insert(dst.end(), nodes.begin(), nodes.end());
      }
  }
}

/// Offset cell for merging: an eighth of a pixel.
inline double merge_cell(double pixel) { return pixel / 8.0; }

}  // namespace detail

/// Subdivision raster: counts of cylinder anchor points pi(w p^inf) per pixel,
/// with every word of length up to `depth` counted once (merged words by weight).
inline HitCounts subdivision_counts(const SystemSpec& spec, const RasterConfig& cfg, const Subdivision& sd) {
  const Viewport vp = cfg.viewport.value_or(default_viewport(spec));
  detail::validate(cfg, vp);
  if (sd.depth < 0) throw Error(ErrorKind::InvalidArgument, "subdivision depth must be non-negative");
  const detail::PixelMap pm(vp, cfg.width, cfg.height);
  const detail::CylinderWalk walk(spec, vp, pm.pixel_size());
  const Vec2 u = spec.translation();
  const std::size_t npx = static_cast<std::size_t>(cfg.width) * static_cast<std::size_t>(cfg.height);
  const unsigned workers = detail::worker_count(cfg.threads);
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(npx, 0));

  detail::merged_walk(
      spec, walk, detail::merge_cell(pm.pixel_size()), sd.depth, 0, workers,
      [&](const AffineMap& f, const detail::WalkNode& node, auto& push) {
        const Vec2 step = f.linear * u;
        push(1, node.c + step, node.weight, 0);
        push(1, node.c - step, node.weight, 0);
      },
      [&](unsigned t, const AffineMap& f, const detail::WalkNode& node) {
        if (const long idx = pm.index(f(walk.anchor)); idx >= 0) partial[t][static_cast<std::size_t>(idx)] += node.weight;
      });

  HitCounts out{cfg.width, cfg.height, std::vector<std::uint64_t>(npx, 0)};
  for (const auto& p : partial)
    for (std::size_t i = 0; i < npx; ++i) out.counts[i] += p[i];
  return out;
}

/// 0 stays 0; otherwise 1 + round(254 log c / log c_max), all 255 when c_max = 1.
inline Image tone_map(const HitCounts& h) {
  Image img{h.width, h.height, std::vector<std::uint8_t>(h.counts.size(), 0)};
  const std::uint64_t cmax = h.counts.empty() ? 0 : *std::max_element(h.counts.begin(), h.counts.end());
  if (cmax == 0) return img;
  const double lmax = std::log(static_cast<double>(cmax));
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const std::uint64_t c = h.counts[i];
    if (c == 0) continue;
    img.pixels[i] = cmax <= 1 ? 255
                              : static_cast<std::uint8_t>(1 + std::lround(254.0 * std::log(static_cast<double>(c)) / lmax));
  }
  return img;
}

inline Image render_attractor(const SystemSpec& spec, const RasterConfig& cfg) {
  if (const auto* g = std::get_if<ChaosGame>(&cfg.method)) return tone_map(chaos_game_counts(spec, cfg, *g));
  return tone_map(subdivision_counts(spec, cfg, std::get<Subdivision>(cfg.method)));
}

/// Points pi(z t^inf) of the language blocks^*, with z refined until its cylinder is
/// below a pixel (at most `max_length` letters). Binary: 255 where hit.
inline Image render_overlay_language(const SystemSpec& spec, const std::vector<Word>& blocks, const RasterConfig& cfg,
                                     int max_length = 512) {
  const Viewport vp = cfg.viewport.value_or(default_viewport(spec));
  detail::validate(cfg, vp);
  const detail::PixelMap pm(vp, cfg.width, cfg.height);
  Image img{cfg.width, cfg.height, std::vector<std::uint8_t>(static_cast<std::size_t>(cfg.width) * cfg.height, 0)};
  if (blocks.empty()) return img;
  for (const auto& b : blocks)
    if (b.empty()) throw Error(ErrorKind::InvalidArgument, "overlay blocks must be non-empty");
  const detail::CylinderWalk walk(spec, vp, pm.pixel_size(), 1.0);
  std::vector<Vec2> block_offsets;
  for (const auto& b : blocks) block_offsets.push_back(affine_of_word(spec, b).offset);
  // tail point: pi(b_0^inf), a point of the language closure
  const Vec2 tail = project(spec, EventualAddress{Word{}, blocks.front()});
  detail::merged_walk(
      spec, walk, detail::merge_cell(pm.pixel_size()), max_length, 0, 1,
      [&](const AffineMap& f, const detail::WalkNode& node, auto& push) {
        for (std::size_t i = 0; i < blocks.size(); ++i)
          push(static_cast<int>(blocks[i].size()), node.c + f.linear * block_offsets[i], 1, 0);
      },
      [&](unsigned, const AffineMap& f, const detail::WalkNode&) {
        if (const long idx = pm.index(f(tail)); idx >= 0) img.pixels[static_cast<std::size_t>(idx)] = 255;
      });
  return img;
}

inline Image render_overlay_uniqueness(const SystemSpec& spec, const UniquenessCertificate& cert,
                                       const RasterConfig& cfg) {
  return render_overlay_language(spec, {cert.u + cert.v, cert.u + cert.w}, cfg);
}

/// Points pi(w ...) for infinite words avoiding every factor in `forbidden`
/// (for example {mmm, ppp}), refined to pixel size. Binary: 255 where hit.
inline Image render_overlay_avoiding(const SystemSpec& spec, const std::vector<Word>& forbidden,
                                     const RasterConfig& cfg, int max_depth = 64) {
  const Viewport vp = cfg.viewport.value_or(default_viewport(spec));
  detail::validate(cfg, vp);
  const detail::PixelMap pm(vp, cfg.width, cfg.height);
  Image img{cfg.width, cfg.height, std::vector<std::uint8_t>(static_cast<std::size_t>(cfg.width) * cfg.height, 0)};
  const detail::CylinderWalk walk(spec, vp, pm.pixel_size(), 1.0);
  const Vec2 u = spec.translation();

  // The walk only needs the last `keep` letters; the tag packs them with their count.
  std::size_t keep = 0;
  for (const auto& f : forbidden) {
    if (f.empty()) throw Error(ErrorKind::InvalidArgument, "forbidden factors must be non-empty");
    keep = std::max(keep, f.size() - 1);
  }
  if (keep > 24) throw Error(ErrorKind::InvalidArgument, "forbidden factors longer than 25 letters");
  auto unpack = [&](std::uint32_t tag) {
    Word w;
    const std::uint32_t len = tag >> 25;
    for (std::uint32_t i = 0; i < len; ++i) w.push_back(((tag >> (len - 1 - i)) & 1U) ? Digit::p : Digit::m);
    return w;
  };
  auto pack = [&](const Word& w) {
    const std::size_t start = w.size() > keep ? w.size() - keep : 0;
    std::uint32_t bits = 0;
    for (std::size_t i = start; i < w.size(); ++i) bits = (bits << 1) | (w[i] == Digit::p ? 1U : 0U);
    return (static_cast<std::uint32_t>(w.size() - start) << 25) | bits;
  };
  auto ok = [&](const Word& w) {
    for (const auto& f : forbidden)
      if (f.size() <= w.size() && w.substr(w.size() - f.size()) == f) return false;
    return true;
  };
  // Close each leaf with the admissible continuation that alternates as much as possible.
  auto leaf_point = [&](const AffineMap& f, const Word& w) {
    Word tail;
    Word cur = w;
    for (int i = 0; i < 64; ++i) {
      Digit d = cur.empty() ? Digit::p : flip(cur[cur.size() - 1]);
      if (!ok(cur + d)) d = flip(d);
      cur.push_back(d);
      tail.push_back(d);
    }
    return f(affine_of_word(spec, tail)(Vec2{}));
  };
  detail::merged_walk(
      spec, walk, detail::merge_cell(pm.pixel_size()), max_depth, pack(Word{}), 1,
      [&](const AffineMap& f, const detail::WalkNode& node, auto& push) {
        const Word w = unpack(node.tag);
        const Vec2 step = f.linear * u;
        for (Digit d : {Digit::p, Digit::m}) {
          const Word next = w + d;
          if (ok(next)) push(1, node.c + step * static_cast<double>(value(d)), 1, pack(next));
        }
      },
      [&](unsigned, const AffineMap& f, const detail::WalkNode& node) {
        if (const long idx = pm.index(leaf_point(f, unpack(node.tag))); idx >= 0)
          img.pixels[static_cast<std::size_t>(idx)] = 255;
      });
  return img;
}

/// Fraction of pixels occupied in both images among those occupied in either.
inline double occupancy_agreement(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height) throw Error(ErrorKind::InvalidArgument, "image sizes differ");
  std::size_t both = 0, either = 0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const bool x = a.pixels[i] != 0, y = b.pixels[i] != 0;
    both += x && y;
    either += x || y;
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

// ---------------------------------------------------------------------------
// Output

inline std::string encode_pgm(const Image& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
  return out;
}

inline Image decode_pgm(const std::string& data) {
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < data.size() && std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    return data.substr(start, pos - start);
  };
  if (token() != "P5") throw Error(ErrorKind::Parse, "not a binary PGM");
  Image img;
  img.width = std::stoi(token());
  img.height = std::stoi(token());
  if (token() != "255") throw Error(ErrorKind::Parse, "unsupported maxval");
  ++pos;  // single whitespace after the header
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  if (data.size() < pos + n) throw Error(ErrorKind::Parse, "truncated PGM");
  img.pixels.assign(data.begin() + static_cast<std::ptrdiff_t>(pos), data.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return img;
}

namespace detail {

inline void put_be32(std::string& s, std::uint32_t v) {
  for (int sh = 24; sh >= 0; sh -= 8) s.push_back(static_cast<char>((v >> sh) & 0xFF));
}

inline void png_chunk(std::string& out, const char* type, const std::string& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  out += body;
  put_be32(out, static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()))));
}

}  // namespace detail

/// PNG, 8-bit greyscale (channels = 1) or RGB (channels = 3) from interleaved samples.
inline std::string encode_png(int width, int height, int channels, const std::vector<std::uint8_t>& samples) {
  std::string raw;
  const std::size_t row = static_cast<std::size_t>(width) * channels;
  raw.reserve((row + 1) * height);
  for (int y = 0; y < height; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(samples.data()) + y * row, row);
  }
  uLongf clen = compressBound(static_cast<uLong>(raw.size()));
  std::string comp(clen, '\0');
  if (compress2(reinterpret_cast<Bytef*>(comp.data()), &clen, reinterpret_cast<const Bytef*>(raw.data()),
                static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw Error(ErrorKind::InvalidArgument, "zlib compression failed");
  comp.resize(clen);

  std::string out("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  detail::put_be32(ihdr, static_cast<std::uint32_t>(width));
  detail::put_be32(ihdr, static_cast<std::uint32_t>(height));
  ihdr += static_cast<char>(8);
  ihdr += static_cast<char>(channels == 3 ? 2 : 0);
  ihdr += std::string(3, '\0');
  detail::png_chunk(out, "IHDR", ihdr);
  detail::png_chunk(out, "IDAT", comp);
  detail::png_chunk(out, "IEND", "");
  return out;
}

inline std::string encode_png(const Image& img) { return encode_png(img.width, img.height, 1, img.pixels); }

/// False colour: attractor in grey, overlay pixels in red.
inline std::string encode_overlay_png(const Image& base, const Image& overlay) {
  if (base.width != overlay.width || base.height != overlay.height)
    throw Error(ErrorKind::InvalidArgument, "image sizes differ");
  std::vector<std::uint8_t> rgb(base.pixels.size() * 3);
  for (std::size_t i = 0; i < base.pixels.size(); ++i) {
    const std::uint8_t g = base.pixels[i] ? static_cast<std::uint8_t>(96 + base.pixels[i] / 4) : 0;
    const bool hit = overlay.pixels[i] != 0;
    rgb[3 * i] = hit ? 255 : g;
    rgb[3 * i + 1] = hit ? 0 : g;
    rgb[3 * i + 2] = hit ? 0 : g;
  }
  return encode_png(base.width, base.height, 3, rgb);
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace saffine
