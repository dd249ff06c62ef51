#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ggi/error.hpp"
#include "ggi/layout.hpp"
#include "ggi/mesh_io.hpp"
#include "ggi/palette.hpp"
#include "ggi/pattern.hpp"
#include "ggi/raster.hpp"
#include "test_util.hpp"

using namespace ggi;
using namespace ggi::testutil;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ggi_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string stem(const std::string& name) const { return (path / name).string(); }
};

// Point-in-polygon by crossing count.
bool inside_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool in = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((poly[i].y > p.y) != (poly[j].y > p.y) &&
        p.x < (poly[j].x - poly[i].x) * (p.y - poly[i].y) / (poly[j].y - poly[i].y) + poly[i].x) {
      in = !in;
    }
  }
  return in;
}

double dist_to_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  double best = 1e300;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    best = std::min(best, (p - q).norm());
  }
  return best;
}

Rgb8 rgb_at(const std::vector<uint8_t>& img, int side, int x, int y) {
  const size_t i = (static_cast<size_t>(y) * side + x) * 3;
  return {img[i], img[i + 1], img[i + 2]};
}

}  // namespace

TEST_CASE("semantic fill matches a supersampled polygon oracle on an L-shape") {
  SewingPattern pat;
  Panel p;
  p.id = "ell";
  p.panel_type = "torso_front";
  p.vertices = {{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 10}, {0, 10}};
  p.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}};
  pat.panels.push_back(p);
  REQUIRE(validate_pattern(pat).empty());

  const PackedLayout layout = pack_layout(pat, 2.0, 2);
  const auto img = render_semantic(layout, pat);
  const Rgb8 fill = panel_type_color("torso_front", true);
  const PanelFrame frame(p, layout.placements.at("ell"), layout.resolution_scale);

  int checked = 0;
  for (int y = 0; y < layout.side; ++y) {
    for (int x = 0; x < layout.side; ++x) {
      const Rgb8 c = rgb_at(img, layout.side, x, y);
      if (!frame.contains_pixel(x, y)) {
        CHECK(c == kBackground);
        continue;
      }
      // 4x4 supersampling decides the clear-cut pixels; pixels straddling
      // the outline may legitimately go either way.
      const Vec2 center = frame.sample_point(x, y);
      int hits = 0;
      for (int sy = 0; sy < 4; ++sy) {
        for (int sx = 0; sx < 4; ++sx) {
          const Vec2 sample{center.x + (sx - 1.5) / 4.0 / layout.resolution_scale,
                            center.y + (sy - 1.5) / 4.0 / layout.resolution_scale};
          if (inside_polygon(p.vertices, sample)) ++hits;
        }
      }
      const double d_px = dist_to_polygon(p.vertices, center) * layout.resolution_scale;
      if (hits == 16) {
        CHECK(c == fill);
        ++checked;
      } else if (hits == 0 && d_px > 1.0) {
        CHECK(c == kBackground);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("panels of one type share a color; different types differ") {
  SewingPattern pat;
  pat.panels.push_back(square_panel("a", "torso_front", 6.0));
  pat.panels.push_back(square_panel("b", "torso_front", 6.0));
  pat.panels.push_back(square_panel("c", "torso_back", 6.0));
  const PackedLayout layout = pack_layout(pat, 1.0, 2);
  const auto img = render_semantic(layout, pat);
  auto center_color = [&](const std::string& id) {
    const Placement& pl = layout.placements.at(id);
    return rgb_at(img, layout.side, pl.origin_x + pl.width / 2, pl.origin_y + pl.height / 2);
  };
  CHECK(center_color("a") == center_color("b"));
  CHECK(center_color("a") != center_color("c"));
  CHECK(center_color("a") == panel_type_color("torso_front", true));
}

TEST_CASE("strict semantic rendering rejects unknown panel types") {
  SewingPattern pat;
  pat.panels.push_back(square_panel("a", "mystery_flap", 6.0));
  const PackedLayout layout = pack_layout(pat, 1.0, 2);
  CHECK_NOTHROW(render_semantic(layout, pat, false));
  try {
    render_semantic(layout, pat, true);
    FAIL("expected UnknownPanelType");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownPanelType);
  }
}

TEST_CASE("stitch bands: one color, two sides, balanced lengths") {
  const Fixture fx = make_fixture(FixtureKind::kTwoSquareStitched);
  const PackedLayout layout = pack_layout(fx.pattern, 4.0, 2);
  const auto img = render_stitching(layout, fx.pattern);
  std::map<uint32_t, std::map<std::string, int>> count_by_color_panel;
  for (int y = 0; y < layout.side; ++y) {
    for (int x = 0; x < layout.side; ++x) {
      const Rgb8 c = rgb_at(img, layout.side, x, y);
      if (c == kBackground) continue;
      for (const auto& [id, pl] : layout.placements) {
        if (x >= pl.origin_x && x < pl.origin_x + pl.width && y >= pl.origin_y &&
            y < pl.origin_y + pl.height) {
          count_by_color_panel[c.packed()][id]++;
        }
      }
    }
  }
  REQUIRE(count_by_color_panel.size() == 1);  // one stitch, one color
  const auto& per_panel = count_by_color_panel.begin()->second;
  REQUIRE(per_panel.size() == 2);  // band on both panels
  const int na = per_panel.at("left");
  const int nb = per_panel.at("right");
  CHECK(std::abs(na - nb) <= 1);
  CHECK(na > 10);
  CHECK(stitch_id_of_color(stitch_color(0)).value() == 0);
}

TEST_CASE("no stitches leaves the stitch raster all background") {
  const Fixture fx = make_fixture(FixtureKind::kFlatGrid);
  const PackedLayout layout = pack_layout(fx.pattern, 4.0, 2);
  const auto img = render_stitching(layout, fx.pattern);
  for (uint8_t v : img) CHECK(v == 0);
}

TEST_CASE("dart stitch draws two bands of one color inside one panel") {
  const Fixture fx = make_fixture(FixtureKind::kDartSquare);
  const PackedLayout layout = pack_layout(fx.pattern, 8.0, 2);
  const auto img = render_stitching(layout, fx.pattern);
  const Rgb8 expect = stitch_color(0);
  int band_pixels = 0;
  for (int y = 0; y < layout.side; ++y) {
    for (int x = 0; x < layout.side; ++x) {
      const Rgb8 c = rgb_at(img, layout.side, x, y);
      if (c == kBackground) continue;
      CHECK(c == expect);
      ++band_pixels;
    }
  }
  CHECK(band_pixels > 10);
}

TEST_CASE("flat geometry is stored exactly up to float quantization") {
  const Fixture fx = make_fixture(FixtureKind::kFlatGrid);
  EncodeOptions opts;
  opts.resolution = 128;
  const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
  const Panel& panel = fx.pattern.panels[0];
  const PanelFrame frame(panel, raster.layout.placements.at(panel.id),
                         raster.layout.resolution_scale);
  // Pixels holding a mesh vertex or a rim sample snap to that feature,
  // up to ~0.7 px from the pixel center; everything else interpolates the
  // flat plane exactly. Check a per-pixel cap plus a tight mean.
  const double px = 1.0 / raster.layout.resolution_scale;
  int valid_count = 0;
  double dev_sum = 0.0;
  for (int y = 0; y < raster.side; ++y) {
    for (int x = 0; x < raster.side; ++x) {
      if (!raster.is_valid(x, y)) continue;
      ++valid_count;
      const Vec2 p = frame.sample_point(x, y);
      const Vec3 w = raster.world_at(x, y);
      const double dev = std::max(std::abs(w.x - p.x), std::abs(w.y - p.y));
      dev_sum += dev;
      CHECK(dev <= px);
      CHECK(std::abs(w.z) < 1e-3);
      // Points always stay on the panel.
      CHECK(w.x >= -1e-3);
      CHECK(w.x <= 10.0 + 1e-3);
      CHECK(w.y >= -1e-3);
      CHECK(w.y <= 10.0 + 1e-3);
    }
  }
  CHECK(dev_sum / valid_count < 0.25 * px);
  // Interior coverage should be near the full content rectangle.
  const Placement& pl = raster.layout.placements.at(panel.id);
  CHECK(valid_count >= (pl.width - 2) * (pl.height - 2));
}

TEST_CASE("cylinder geometry stays within mesh chord error of the true surface") {
  FixtureParams params;
  params.n = 48;
  const Fixture fx = make_fixture(FixtureKind::kCylinderPanel, params);
  EncodeOptions opts;
  opts.resolution = 256;
  const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
  // Max sagitta of a chord spanning one mesh cell: s = r * theta^2 / 8.
  const double span = 2.0 * 3.14159265358979323846 * params.radius / (params.n - 1);
  const double tol = params.radius * (span / params.radius) * (span / params.radius) / 8.0 + 0.01;
  double worst = 0.0;
  for (int y = 0; y < raster.side; ++y) {
    for (int x = 0; x < raster.side; ++x) {
      if (!raster.is_valid(x, y)) continue;
      worst = std::max(worst, fx.surface_distance(raster.world_at(x, y)));
    }
  }
  CHECK(worst <= tol);
}

TEST_CASE("hybrid interpolation covers the rim better than barycentric only") {
  const Fixture fx = make_fixture(FixtureKind::kCylinderPanel);
  EncodeOptions opts;
  opts.resolution = 256;
  const GgiRaster hybrid = encode(fx.pattern, fx.meshes, opts);
  opts.mode = InterpolationMode::kBarycentricOnly;
  const GgiRaster bary = encode(fx.pattern, fx.meshes, opts);
  size_t nh = 0, nb = 0;
  for (size_t i = 0; i < hybrid.valid.size(); ++i) {
    nh += hybrid.valid[i];
    nb += bary.valid[i];
    // Hybrid only adds pixels, never removes them.
    if (bary.valid[i]) CHECK(hybrid.valid[i]);
  }
  CHECK(nh > nb);
}

TEST_CASE("raster planes stay mutually aligned") {
  for (FixtureKind kind : {FixtureKind::kTwoSquareStitched, FixtureKind::kDartSquare,
                           FixtureKind::kMultiPanelSkirt}) {
    const Fixture fx = make_fixture(kind);
    EncodeOptions opts;
    opts.resolution = 160;
    const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
    CHECK(raster.semantic.size() == size_t(raster.side) * raster.side * 3);
    CHECK(raster.stitching.size() == raster.semantic.size());
    CHECK(raster.geometry.size() == raster.semantic.size());
    CHECK(raster.valid.size() == size_t(raster.side) * raster.side);
    for (int y = 0; y < raster.side; ++y) {
      for (int x = 0; x < raster.side; ++x) {
        if (raster.is_valid(x, y)) {
          // Geometry pixels always carry a semantic label.
          CHECK(raster.semantic_at(x, y) != kBackground);
        } else {
          const Vec3 g = raster.geometry_at(x, y);
          CHECK(g == Vec3{0, 0, 0});
        }
        if (raster.stitching_at(x, y) != kBackground) {
          // Stitch bands hug the occupied region; a band pixel may fall
          // just outside it but never further than one pixel away.
          bool near_valid = false;
          for (int dy = -1; dy <= 1 && !near_valid; ++dy) {
            for (int dx = -1; dx <= 1 && !near_valid; ++dx) {
              const int nx = x + dx, ny = y + dy;
              if (nx >= 0 && ny >= 0 && nx < raster.side && ny < raster.side &&
                  raster.is_valid(nx, ny)) {
                near_valid = true;
              }
            }
          }
          CHECK(near_valid);
        }
      }
    }
  }
}

TEST_CASE("disk roundtrip is bitwise for every fixture") {
  TempDir tmp;
  for (FixtureKind kind : {FixtureKind::kFlatGrid, FixtureKind::kCylinderPanel,
                           FixtureKind::kTwoSquareStitched, FixtureKind::kDartSquare,
                           FixtureKind::kMultiPanelSkirt}) {
    const Fixture fx = make_fixture(kind);
    EncodeOptions opts;
    opts.resolution = 96;
    const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
    const std::string stem = tmp.stem(fixture_kind_name(kind));
    write_ggi(raster, stem);
    const GgiRaster back = read_ggi(stem);
    CHECK(back == raster);

    // A second write produces byte-identical files.
    const std::string stem2 = stem + "_again";
    write_ggi(raster, stem2);
    for (const char* suffix : {".semantic.png", ".stitch.png", ".geom.f32", ".ggi.json"}) {
      std::ifstream f1(stem + suffix, std::ios::binary);
      std::ifstream f2(stem2 + suffix, std::ios::binary);
      const std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
      const std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
      CHECK(b1 == b2);
      CHECK(!b1.empty());
    }
  }
}

TEST_CASE("truncated geometry file fails the checksum") {
  TempDir tmp;
  const Fixture fx = make_fixture(FixtureKind::kFlatGrid);
  EncodeOptions opts;
  opts.resolution = 64;
  const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
  const std::string stem = tmp.stem("trunc");
  write_ggi(raster, stem);
  const std::string geom = stem + ".geom.f32";
  const auto size = fs::file_size(geom);
  fs::resize_file(geom, size - 8);
  try {
    read_ggi(stem);
    FAIL("expected ChecksumMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ChecksumMismatch);
  }
}

TEST_CASE("corrupted geometry payload fails the checksum") {
  TempDir tmp;
  const Fixture fx = make_fixture(FixtureKind::kFlatGrid);
  EncodeOptions opts;
  opts.resolution = 64;
  const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
  const std::string stem = tmp.stem("corrupt");
  write_ggi(raster, stem);
  {
    std::fstream f(stem + ".geom.f32", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(64);
    const char junk = 0x5a;
    f.write(&junk, 1);
  }
  try {
    read_ggi(stem);
    FAIL("expected ChecksumMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ChecksumMismatch);
  }
}

TEST_CASE("sidecar/raster side disagreement is detected") {
  TempDir tmp;
  const Fixture fx = make_fixture(FixtureKind::kFlatGrid);
  EncodeOptions opts;
  opts.resolution = 64;
  const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
  const std::string stem = tmp.stem("side");
  write_ggi(raster, stem);
  // Point the sidecar at a different side than the images carry.
  std::ifstream in(stem + ".ggi.json");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  const std::string needle = "\"side\": " + std::to_string(raster.side);
  const auto pos = text.find(needle);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, needle.size(), "\"side\": " + std::to_string(raster.side + 1));
  std::ofstream(stem + ".ggi.json") << text;
  try {
    read_ggi(stem);
    FAIL("expected FormatVersionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::FormatVersionMismatch);
  }
}

TEST_CASE("encode fits the packed square to the requested resolution") {
  const Fixture fx = make_fixture(FixtureKind::kMultiPanelSkirt);
  for (int res : {128, 256}) {
    EncodeOptions opts;
    opts.resolution = res;
    const GgiRaster raster = encode(fx.pattern, fx.meshes, opts);
    CHECK(raster.side == res);
    CHECK(raster.layout.side <= res);
    CHECK(raster.norm.scale > 0.0);
    // Every mesh vertex is inside the normalized [-1, 1] cube.
    for (const PanelMesh& mesh : fx.meshes) {
      for (const Vec3& v : mesh.vertices3d) {
        const Vec3 n = raster.norm.normalize(v);
        CHECK(std::abs(n.x) <= 1.0 + 1e-9);
        CHECK(std::abs(n.y) <= 1.0 + 1e-9);
        CHECK(std::abs(n.z) <= 1.0 + 1e-9);
      }
    }
  }
}
