#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ggi/error.hpp"
#include "ggi/mesh_io.hpp"
#include "ggi/metrics.hpp"
#include "ggi/palette.hpp"
#include "ggi/raster.hpp"
#include "test_util.hpp"

using namespace ggi;
using namespace ggi::testutil;

namespace {

GgiRaster synthetic_block(int side, int lo, int hi) {
  GgiRaster r = blank_raster(side);
  for (int y = lo; y < hi; ++y) {
    for (int x = lo; x < hi; ++x) {
      // Exactly representable in float so tests can assert equality.
      set_pixel(&r, x, y, {x * 0.5, y * 0.25, (x + y) * 0.125});
    }
  }
  return r;
}

// Independent re-implementation: band = valid pixels within Chebyshev
// distance w of a contour pixel (valid pixel touching invalid/outside).
std::vector<uint8_t> naive_band(const GgiRaster& r, int w) {
  const int side = r.side;
  auto valid = [&](int x, int y) {
    return x >= 0 && y >= 0 && x < side && y < side && r.is_valid(x, y);
  };
  auto is_contour = [&](int x, int y) {
    if (!valid(x, y)) return false;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (!valid(x + dx, y + dy)) return true;
      }
    }
    return false;
  };
  std::vector<uint8_t> band(size_t(side) * side, 0);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (!valid(x, y)) continue;
      bool near = false;
      for (int cy = 0; cy < side && !near; ++cy) {
        for (int cx = 0; cx < side && !near; ++cx) {
          if (is_contour(cx, cy) && std::max(std::abs(cx - x), std::abs(cy - y)) <= w) near = true;
        }
      }
      if (near) band[r.idx(x, y)] = 1;
    }
  }
  return band;
}

double naive_edge_aware_l1(const GgiRaster& gt, const GgiRaster& pred, double alpha, int w) {
  const auto band = naive_band(gt, w);
  double isum = 0, bsum = 0;
  size_t in = 0, bn = 0;
  for (int y = 0; y < gt.side; ++y) {
    for (int x = 0; x < gt.side; ++x) {
      if (!gt.is_valid(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const size_t i = gt.idx(x, y) * 3 + c;
        const double pv = pred.valid[gt.idx(x, y)] ? pred.geometry[i] : 0.0;
        const double d = std::abs(double(gt.geometry[i]) - pv);
        isum += d;
        ++in;
        if (band[gt.idx(x, y)]) {
          bsum += d;
          ++bn;
        }
      }
    }
  }
  return (in ? isum / in : 0.0) + alpha * (bn ? bsum / bn : 0.0);
}

double naive_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto one_way = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double sum = 0;
    for (const auto& p : from) {
      double best = 1e300;
      for (const auto& q : to) best = std::min(best, dist(p, q));
      sum += best;
    }
    return sum / from.size();
  };
  return one_way(a, b) + one_way(b, a);
}

}  // namespace

TEST_CASE("identical rasters score zero") {
  const GgiRaster r = synthetic_block(16, 2, 14);
  CHECK(edge_aware_l1(r, r) == 0.0);
}

TEST_CASE("a uniform shift scores (1 + alpha) times the shift") {
  const GgiRaster gt = synthetic_block(16, 2, 14);
  GgiRaster pred = gt;
  for (size_t i = 0; i < pred.valid.size(); ++i) {
    if (!pred.valid[i]) continue;
    for (int c = 0; c < 3; ++c) pred.geometry[i * 3 + c] += 0.25f;
  }
  for (double alpha : {0.0, 1.0, 100.0}) {
    CHECK(edge_aware_l1(gt, pred, alpha, 2) == doctest::Approx((1.0 + alpha) * 0.25));
  }
}

TEST_CASE("edge-aware score matches a naive double-loop oracle") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<float> noise(-0.5f, 0.5f);
  for (int iter = 0; iter < 20; ++iter) {
    GgiRaster gt = blank_raster(24);
    // Irregular valid region.
    for (int y = 2; y < 22; ++y) {
      for (int x = 2; x < 22; ++x) {
        if ((x - 12) * (x - 12) + (y - 12) * (y - 12) < 95) {
          set_pixel(&gt, x, y, {x * 0.5, y * 0.5, 0.0});
        }
      }
    }
    GgiRaster pred = gt;
    for (size_t i = 0; i < pred.valid.size(); ++i) {
      if (!pred.valid[i]) continue;
      if (rng() % 8 == 0) pred.valid[i] = 0;  // holes in the prediction
      for (int c = 0; c < 3; ++c) pred.geometry[i * 3 + c] += noise(rng);
    }
    const int w = 1 + int(rng() % 4);
    const double alpha = double(rng() % 200);
    CHECK(edge_aware_l1(gt, pred, alpha, w) ==
          doctest::Approx(naive_edge_aware_l1(gt, pred, alpha, w)).epsilon(1e-12));
    CHECK(edge_band_mask(gt, w) == naive_band(gt, w));
  }
}

TEST_CASE("edge band is contained in the valid mask and covers the contour") {
  const Fixture fx = make_fixture(FixtureKind::kDartSquare);
  EncodeOptions opts;
  opts.resolution = 96;
  const GgiRaster r = encode(fx.pattern, fx.meshes, opts);
  const auto band = edge_band_mask(r, 3);
  CHECK(band == naive_band(r, 3));
  for (size_t i = 0; i < band.size(); ++i) {
    if (band[i]) CHECK(r.valid[i]);
  }
}

TEST_CASE("shape and normalization mismatches are rejected") {
  const GgiRaster a = synthetic_block(16, 2, 14);
  const GgiRaster b = synthetic_block(18, 2, 14);
  try {
    edge_aware_l1(a, b);
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ShapeMismatch);
  }
  GgiRaster c = a;
  c.norm.scale = 2.0;
  try {
    edge_aware_l1(a, c);
    FAIL("expected NormMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NormMismatch);
  }
}

TEST_CASE("coincident stitch bands have zero chamfer, offset bands 2d") {
  GgiRaster r = blank_raster(12);
  const Rgb8 color = stitch_color(0);
  for (int y = 2; y < 8; ++y) {
    for (int x : {2, 7}) {
      set_pixel(&r, x, y, {0.0, y * 1.0, 0.0});
      const size_t i = r.idx(x, y) * 3;
      r.stitching[i] = color.r;
      r.stitching[i + 1] = color.g;
      r.stitching[i + 2] = color.b;
    }
  }
  CHECK(stitch_chamfer(r) == doctest::Approx(0.0));

  // Move one band 1.5 cm away in x: symmetric chamfer = 2 * 1.5.
  for (int y = 2; y < 8; ++y) set_pixel(&r, 7, y, {1.5, y * 1.0, 0.0});
  CHECK(stitch_chamfer(r) == doctest::Approx(3.0));
}

TEST_CASE("stitch chamfer rejects missing or unbalanced bands") {
  GgiRaster r = blank_raster(12);
  try {
    stitch_chamfer(r);
    FAIL("expected EmptySet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptySet);
  }
  const Rgb8 color = stitch_color(0);
  for (int y = 2; y < 8; ++y) {
    set_pixel(&r, 2, y, {0.0, y * 1.0, 0.0});
    const size_t i = r.idx(2, y) * 3;
    r.stitching[i] = color.r;
    r.stitching[i + 1] = color.g;
    r.stitching[i + 2] = color.b;
  }
  try {
    stitch_chamfer(r);  // only one band
    FAIL("expected ChainCountMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ChainCountMismatch);
  }
}

TEST_CASE("encoded fixtures produce a small stitch gap") {
  const Fixture fx = make_fixture(FixtureKind::kTwoSquareStitched);
  EncodeOptions opts;
  opts.resolution = 128;
  const GgiRaster r = encode(fx.pattern, fx.meshes, opts);
  // Both seam edges map to the same 3D line, so the gap is tiny.
  CHECK(stitch_chamfer(r) < 0.5);
}

TEST_CASE("chamfer distance: point pairs and the brute-force oracle") {
  CHECK(chamfer_distance({{0, 0, 0}}, {{3, 4, 0}}) == doctest::Approx(10.0));
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<Vec3> a, b;
    for (size_t i = 0; i < 1 + rng() % 100; ++i) a.push_back({coord(rng), coord(rng), coord(rng)});
    for (size_t i = 0; i < 1 + rng() % 100; ++i) b.push_back({coord(rng), coord(rng), coord(rng)});
    CHECK(chamfer_distance(a, b) == doctest::Approx(naive_chamfer(a, b)).epsilon(1e-12));
  }
  try {
    chamfer_distance({}, {{0, 0, 0}});
    FAIL("expected EmptySet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptySet);
  }
}

TEST_CASE("surface samples stay on the mesh and are seed-deterministic") {
  IndexedMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  mesh.faces = {{0, 1, 2}, {0, 2, 3}};
  const auto s1 = sample_surface(mesh, 2000, 42);
  const auto s2 = sample_surface(mesh, 2000, 42);
  const auto s3 = sample_surface(mesh, 2000, 43);
  CHECK(s1 == s2);
  CHECK(s1 != s3);
  double mx = 0, my = 0;
  for (const Vec3& p : s1) {
    CHECK(p.x >= -1e-12);
    CHECK(p.x <= 1 + 1e-12);
    CHECK(p.y >= -1e-12);
    CHECK(p.y <= 1 + 1e-12);
    CHECK(p.z == 0.0);
    mx += p.x;
    my += p.y;
  }
  // Uniform mean within ~3 sigma of the centroid.
  CHECK(std::abs(mx / s1.size() - 0.5) < 0.03);
  CHECK(std::abs(my / s1.size() - 0.5) < 0.03);
}

TEST_CASE("surface sampling is area weighted 3:1") {
  IndexedMesh mesh;
  // Triangle A: legs 3 and 2, area 3, near the origin.
  // Triangle B: legs 1 and 2, area 1, shifted to x > 10.
  mesh.vertices = {{0, 0, 0}, {3, 0, 0}, {0, 2, 0}, {10, 0, 0}, {11, 0, 0}, {10, 2, 0}};
  mesh.faces = {{0, 1, 2}, {3, 4, 5}};
  const auto samples = sample_surface(mesh, 4000, 7);
  int in_b = 0;
  for (const Vec3& p : samples) in_b += p.x > 5.0;
  CHECK(std::abs(in_b - 1000) < 100);  // p = 1/4, 3 sigma ~ 82
}

TEST_CASE("degenerate-only meshes cannot be sampled") {
  IndexedMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  mesh.faces = {{0, 1, 1}, {0, 1, 2}};  // index-degenerate and zero-area
  try {
    sample_surface(mesh, 10, 1);
    FAIL("expected EmptyMesh");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyMesh);
  }
}
