#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ggi/layout.hpp"
#include "ggi/palette.hpp"
#include "ggi/pattern.hpp"
#include "ggi/vec.hpp"

namespace ggi {

/// Maps normalized [-1,1] coordinates back to world cm:
/// world = normalized * scale + offset.
struct NormInfo {
  Vec3 offset;       // cm, bbox center
  double scale = 1;  // cm, half of the max bbox extent

  Vec3 denormalize(const Vec3& n) const { return n * scale + offset; }
  Vec3 normalize(const Vec3& w) const { return (w - offset) / scale; }
  bool operator==(const NormInfo& o) const { return offset == o.offset && scale == o.scale; }
};

/// Triangulated surface of one panel with UVs in the panel's local
/// pattern space (cm) and per-pattern-edge boundary vertex chains.
struct PanelMesh {
  std::string panel_id;
  std::vector<Vec3> vertices3d;  // cm
  std::vector<Vec2> uv;          // local pattern space, cm
  std::vector<std::array<int, 3>> faces;
  std::vector<std::vector<int>> boundary_edges;  // one chain per pattern edge
};

/// One aligned raster triplet plus occupancy and normalization.
/// All arrays are row-major with y = 0 at the pattern-space bottom.
struct GgiRaster {
  int side = 0;
  std::vector<uint8_t> semantic;   // 3 * side^2, RGB8
  std::vector<uint8_t> stitching;  // 3 * side^2, RGB8
  std::vector<float> geometry;     // 3 * side^2, interleaved xyz, normalized
  std::vector<uint8_t> valid;      // side^2
  NormInfo norm;
  PackedLayout layout;

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * side + x; }

  Rgb8 semantic_at(int x, int y) const {
    const size_t i = idx(x, y) * 3;
    return {semantic[i], semantic[i + 1], semantic[i + 2]};
  }
  Rgb8 stitching_at(int x, int y) const {
    const size_t i = idx(x, y) * 3;
    return {stitching[i], stitching[i + 1], stitching[i + 2]};
  }
  bool is_valid(int x, int y) const { return valid[idx(x, y)] != 0; }
  Vec3 geometry_at(int x, int y) const {
    const size_t i = idx(x, y) * 3;
    return {geometry[i], geometry[i + 1], geometry[i + 2]};
  }
  Vec3 world_at(int x, int y) const { return norm.denormalize(geometry_at(x, y)); }

  bool operator==(const GgiRaster& o) const;
};

enum class InterpolationMode {
  kHybrid,           // linear along panel boundaries, barycentric inside
  kBarycentricOnly,  // no boundary pass; used for comparison
};

/// Fills panel polygons with their type color at pixel centers; pixels
/// within ~0.71 px of the polygon boundary are included so the occupancy
/// of the geometry raster is always covered.
std::vector<uint8_t> render_semantic(const PackedLayout& layout, const SewingPattern& pattern,
                                     bool strict = false);

/// One-pixel-wide bands along both edges of every stitch, colored by
/// stitch id. Bands of the same stitch are kept 8-disconnected so the
/// decoder can recover the two chains (darts share a corner otherwise).
std::vector<uint8_t> render_stitching(const PackedLayout& layout, const SewingPattern& pattern);

/// Rasterizes panel meshes into the geometry plane. Write precedence at
/// conflicting pixels: boundary-linear > vertex > barycentric.
/// Fills raster->geometry, raster->valid and raster->norm.
void render_geometry(const PackedLayout& layout, const SewingPattern& pattern,
                     const std::vector<PanelMesh>& meshes, InterpolationMode mode,
                     GgiRaster* raster);

struct EncodeOptions {
  int resolution = 512;  // target side, pixels
  int margin = 2;
  bool strict = false;
  InterpolationMode mode = InterpolationMode::kHybrid;
};

/// Full encoder: picks resolution_scale so the minimal packed square fits
/// the target, pads the side to the target, renders all three rasters.
GgiRaster encode(const SewingPattern& pattern, const std::vector<PanelMesh>& meshes,
                 const EncodeOptions& opts = {});

/// Writes <stem>.semantic.png, <stem>.stitch.png, <stem>.geom.f32 and
/// <stem>.ggi.json. read(write(r)) == r bitwise.
void write_ggi(const GgiRaster& raster, const std::string& path_stem);
GgiRaster read_ggi(const std::string& path_stem);

}  // namespace ggi
