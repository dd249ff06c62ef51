#include "ggi/remesh.hpp"

#include <cstdint>
#include <map>
#include <unordered_map>

#include "ggi/error.hpp"

namespace ggi {

IndexedMesh remesh(const GgiRaster& raster) {
  const int side = raster.side;
  const size_t npx = static_cast<size_t>(side) * side;

  bool any_valid = false;
  for (size_t i = 0; i < npx; ++i) {
    if (raster.valid[i]) {
      any_valid = true;
      break;
    }
  }
  if (!any_valid) throw Error(Errc::EmptyRaster, "no valid pixels");

  // Pixel -> owning panel, from the placement rectangles.
  std::vector<int> panel_of_pixel(npx, -1);
  std::vector<std::string> panel_ids;
  for (const auto& [id, pl] : raster.layout.placements) {
    const int pi = static_cast<int>(panel_ids.size());
    panel_ids.push_back(id);
    for (int y = pl.origin_y; y < pl.origin_y + pl.height; ++y) {
      for (int x = pl.origin_x; x < pl.origin_x + pl.width; ++x) {
        panel_of_pixel[raster.idx(x, y)] = pi;
      }
    }
  }

  // Provisional vertex index per valid pixel, raster scan order.
  std::vector<int32_t> index_of_pixel(npx, -1);
  int32_t next = 0;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (raster.valid[raster.idx(x, y)]) index_of_pixel[raster.idx(x, y)] = next++;
    }
  }

  std::vector<std::array<int, 3>> faces;
  std::vector<uint8_t> referenced(next, 0);

  auto world = [&](int x, int y) { return raster.world_at(x, y); };

  for (int y = 0; y + 1 < side; ++y) {
    for (int x = 0; x + 1 < side; ++x) {
      // Clockwise circuit of the 2x2 cell.
      const int cx[4] = {x, x + 1, x + 1, x};
      const int cy[4] = {y, y, y + 1, y + 1};
      int valid_count = 0;
      int valid_slot[4];
      int panel = -2;
      bool same_panel = true;
      for (int k = 0; k < 4; ++k) {
        const size_t i = raster.idx(cx[k], cy[k]);
        if (raster.valid[i]) {
          valid_slot[valid_count++] = k;
          const int p = panel_of_pixel[i];
          if (panel == -2) {
            panel = p;
          } else if (p != panel) {
            same_panel = false;
          }
        }
      }
      if (valid_count < 3 || !same_panel) continue;

      auto vid = [&](int k) { return index_of_pixel[raster.idx(cx[k], cy[k])]; };

      if (valid_count == 3) {
        faces.push_back({vid(valid_slot[0]), vid(valid_slot[1]), vid(valid_slot[2])});
      } else {
        const double d1 = dist(world(x, y), world(x + 1, y + 1));
        const double d2 = dist(world(x + 1, y), world(x, y + 1));
        const int i00 = vid(0), i10 = vid(1), i11 = vid(2), i01 = vid(3);
        if (d1 <= d2) {
          faces.push_back({i00, i10, i11});
          faces.push_back({i00, i11, i01});
        } else {
          faces.push_back({i00, i10, i01});
          faces.push_back({i10, i11, i01});
        }
      }
      for (const auto& f : {faces.back(), faces[faces.size() - (valid_count == 4 ? 2 : 1)]}) {
        for (int idx : f) referenced[idx] = 1;
      }
    }
  }

  // Compact: drop vertices no face references, keep scan order.
  std::vector<int32_t> remap(next, -1);
  IndexedMesh mesh;
  int32_t out = 0;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      const int32_t pi = index_of_pixel[raster.idx(x, y)];
      if (pi < 0 || !referenced[pi]) continue;
      remap[pi] = out++;
      mesh.vertices.push_back(world(x, y));
      mesh.uv_of_vertex.emplace_back(x, y);
      const int panel = panel_of_pixel[raster.idx(x, y)];
      mesh.panel_of_vertex.push_back(panel >= 0 ? panel_ids[panel] : std::string());
    }
  }
  mesh.faces.reserve(faces.size());
  for (const auto& f : faces) {
    mesh.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  }
  return mesh;
}

MeshStats mesh_stats(const IndexedMesh& mesh) {
  MeshStats s;
  s.vertex_count = mesh.vertices.size();
  s.face_count = mesh.faces.size();
  std::map<std::pair<int, int>, int> edge_faces;
  for (const auto& f : mesh.faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      ++s.degenerate_face_count;
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_faces[{a, b}];
    }
  }
  for (const auto& [e, n] : edge_faces) {
    if (n == 1) ++s.boundary_edge_count;
    if (n > 2) ++s.non_manifold_edge_count;
  }
  return s;
}

}  // namespace ggi
