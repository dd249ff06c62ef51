#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ggi/pattern.hpp"
#include "ggi/raster.hpp"
#include "ggi/remesh.hpp"

namespace ggi {

inline constexpr const char* kVersion = "0.1.0";

/// Wavefront OBJ subset: v/vt/f lines, vertices and UVs to 6 decimals,
/// header comments carrying the tool version and the normalization
/// transform. Deterministic output; import inverts it exactly.
void export_obj(const IndexedMesh& mesh, const std::string& path, const NormInfo& norm = {});

/// Reads an OBJ written by export_obj (or any v/vt/f subset). Throws Io,
/// ParseError with the offending line number, IndexOutOfRange for face
/// indices outside 1..N. Fills *norm from the header when present.
IndexedMesh import_obj(const std::string& path, NormInfo* norm = nullptr);

enum class FixtureKind {
  kFlatGrid,           // one square panel, flat in 3D
  kCylinderPanel,      // one rectangle rolled into an open tube, self-stitched
  kTwoSquareStitched,  // two coplanar squares sharing one seam
  kDartSquare,         // square with a triangular dart on its top edge
  kMultiPanelSkirt,    // four trapezoids forming a cone frustum
};

struct FixtureParams {
  int n = 16;          // mesh grid resolution per panel
  double size = 10.0;  // cm, square side
  double radius = 10.0;
  double top_radius = 6.0;  // skirt only
  double height = 20.0;
  double dart_width = 1.5;  // half-width of the dart mouth, cm
  double dart_depth = 3.0;
};

/// Synthetic pattern + draped meshes + exact analytic oracles.
struct Fixture {
  SewingPattern pattern;
  std::vector<PanelMesh> meshes;

  /// cm distance from a world point to the analytic surface.
  std::function<double(const Vec3&)> surface_distance;

  /// n points (cm) along the analytic 3D image of one pattern edge,
  /// uniformly in edge parameter.
  std::function<std::vector<Vec3>(const std::string& panel_id, int edge, int n)> edge_samples;
};

Fixture make_fixture(FixtureKind kind, const FixtureParams& params = {});

const char* fixture_kind_name(FixtureKind kind);
bool fixture_kind_from_name(const std::string& name, FixtureKind* out);

}  // namespace ggi
