#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ggi/raster.hpp"
#include "ggi/vec.hpp"

namespace ggi {

/// Triangle mesh with per-vertex raster provenance. Vertices are in world
/// cm (denormalized); uv_of_vertex holds the source pixel.
struct IndexedMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<std::pair<int, int>> uv_of_vertex;
  std::vector<std::string> panel_of_vertex;
};

struct MeshStats {
  size_t vertex_count = 0;
  size_t face_count = 0;
  size_t boundary_edge_count = 0;
  size_t non_manifold_edge_count = 0;
  size_t degenerate_face_count = 0;
};

/// Scans 2x2 pixel cells of the geometry raster: 3 valid pixels give one
/// triangle, 4 give two split along the shorter 3D diagonal (ties pick
/// the main diagonal). Faces are wound so planar input faces +Z. Vertices
/// are emitted in raster scan order; unreferenced pixels get no vertex.
/// Throws EmptyRaster when no valid pixel exists.
IndexedMesh remesh(const GgiRaster& raster);

/// Edge-incidence counts; degenerate faces have fewer than 3 distinct
/// vertex indices.
MeshStats mesh_stats(const IndexedMesh& mesh);

}  // namespace ggi
