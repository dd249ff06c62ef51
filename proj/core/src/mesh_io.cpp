#include "ggi/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ggi/error.hpp"

namespace ggi {

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void export_obj(const IndexedMesh& mesh, const std::string& path, const NormInfo& norm) {
  std::ostringstream out;
  out << "# ggi-kit " << kVersion << "\n";
  out << "# norm " << g17(norm.offset.x) << " " << g17(norm.offset.y) << " "
      << g17(norm.offset.z) << " " << g17(norm.scale) << "\n";
  for (const auto& v : mesh.vertices) {
    out << "v " << fmt6(v.x) << " " << fmt6(v.y) << " " << fmt6(v.z) << "\n";
  }
  const bool with_uv = mesh.uv_of_vertex.size() == mesh.vertices.size();
  if (with_uv) {
    for (const auto& [u, v] : mesh.uv_of_vertex) {
      out << "vt " << fmt6(u) << " " << fmt6(v) << "\n";
    }
  }
  for (const auto& f : mesh.faces) {
    out << "f";
    for (int k = 0; k < 3; ++k) {
      const int i = f[k] + 1;
      out << " " << i;
      if (with_uv) out << "/" << i;
    }
    out << "\n";
  }

  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::Io, "cannot open for write: " + path);
  const std::string text = out.str();
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw Error(Errc::Io, "write failed: " + path);
}

IndexedMesh import_obj(const std::string& path, NormInfo* norm) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::Io, "cannot open for read: " + path);

  IndexedMesh mesh;
  std::vector<std::pair<double, double>> uvs;
  std::string line;
  int line_no = 0;
  auto parse_error = [&](const std::string& reason) {
    return Error(Errc::ParseError, "line " + std::to_string(line_no) + ": " + reason);
  };

  while (std::getline(file, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      double ox, oy, oz, s;
      if (norm && std::sscanf(line.c_str(), "# norm %lf %lf %lf %lf", &ox, &oy, &oz, &s) == 4) {
        norm->offset = {ox, oy, oz};
        norm->scale = s;
      }
      continue;
    }
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) throw parse_error("malformed vertex");
      mesh.vertices.push_back(v);
    } else if (tag == "vt") {
      double u, v;
      if (!(ls >> u >> v)) throw parse_error("malformed texture coordinate");
      uvs.emplace_back(u, v);
    } else if (tag == "f") {
      std::array<int, 3> face{};
      for (int k = 0; k < 3; ++k) {
        std::string token;
        if (!(ls >> token)) throw parse_error("face needs three indices");
        // Accept "i" and "i/j"; ignore the texture index (parallel by
        // construction in our exports).
        int vi = 0;
        if (std::sscanf(token.c_str(), "%d", &vi) != 1) throw parse_error("malformed face index");
        if (vi < 1 || vi > static_cast<int>(mesh.vertices.size())) {
          throw Error(Errc::IndexOutOfRange, "line " + std::to_string(line_no) + ": face index " +
                                                 std::to_string(vi) + " outside 1.." +
                                                 std::to_string(mesh.vertices.size()));
        }
        face[k] = vi - 1;
      }
      std::string extra;
      if (ls >> extra) throw parse_error("only triangles are supported");
      mesh.faces.push_back(face);
    } else {
      throw parse_error("unsupported record '" + tag + "'");
    }
  }
  if (uvs.size() == mesh.vertices.size()) {
    mesh.uv_of_vertex.reserve(uvs.size());
    for (const auto& [u, v] : uvs) {
      mesh.uv_of_vertex.emplace_back(static_cast<int>(std::lround(u)),
                                     static_cast<int>(std::lround(v)));
    }
  } else if (!uvs.empty()) {
    throw Error(Errc::ParseError, "texture coordinate count does not match vertex count");
  }
  return mesh;
}

namespace {

Panel rectangle_panel(const std::string& id, const std::string& type, double w, double h) {
  Panel p;
  p.id = id;
  p.panel_type = type;
  p.vertices = {{0, 0}, {w, 0}, {w, h}, {0, h}};
  p.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return p;
}

/// Grid mesh over [0,w]x[0,h] lifted by `lift`, with one boundary chain
/// per rectangle edge (bottom, right, top, left) in polygon direction.
PanelMesh grid_mesh(const std::string& panel_id, double w, double h, int n,
                    const std::function<Vec3(const Vec2&)>& lift) {
  PanelMesh m;
  m.panel_id = panel_id;
  auto vid = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 uv{w * i / (n - 1), h * j / (n - 1)};
      m.uv.push_back(uv);
      m.vertices3d.push_back(lift(uv));
    }
  }
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i + 1 < n; ++i) {
      m.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  m.boundary_edges.resize(4);
  for (int i = 0; i < n; ++i) m.boundary_edges[0].push_back(vid(i, 0));
  for (int j = 0; j < n; ++j) m.boundary_edges[1].push_back(vid(n - 1, j));
  for (int i = n - 1; i >= 0; --i) m.boundary_edges[2].push_back(vid(i, n - 1));
  for (int j = n - 1; j >= 0; --j) m.boundary_edges[3].push_back(vid(0, j));
  return m;
}

/// Uniform samples of the straight pattern edge, lifted pointwise.
std::vector<Vec3> lifted_edge_samples(const Panel& panel, int edge, int n,
                                      const std::function<Vec3(const Vec2&)>& lift) {
  const Vec2 a = panel.vertices[panel.edges[edge].first];
  const Vec2 b = panel.vertices[panel.edges[edge].second];
  std::vector<Vec3> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.0 : static_cast<double>(k) / (n - 1);
    out.push_back(lift(a + (b - a) * t));
  }
  return out;
}

Fixture make_flat_grid(const FixtureParams& p) {
  if (p.n < 2 || p.size <= 0) throw Error(Errc::BadParams, "flat_grid needs n >= 2, size > 0");
  auto lift = [](const Vec2& uv) { return Vec3{uv.x, uv.y, 0.0}; };

  Fixture f;
  f.pattern.name = "flat_grid";
  f.pattern.panels.push_back(rectangle_panel("panel_0", "panel", p.size, p.size));
  f.meshes.push_back(grid_mesh("panel_0", p.size, p.size, p.n, lift));
  f.surface_distance = [](const Vec3& q) { return std::abs(q.z); };
  f.edge_samples = [pattern = f.pattern, lift](const std::string& id, int edge, int n) {
    return lifted_edge_samples(*pattern.find_panel(id), edge, n, lift);
  };
  return f;
}

Fixture make_cylinder_panel(const FixtureParams& p) {
  if (p.n < 2 || p.radius <= 0 || p.height <= 0) {
    throw Error(Errc::BadParams, "cylinder_panel needs n >= 2, radius > 0, height > 0");
  }
  const double r = p.radius, h = p.height;
  const double w = 2.0 * M_PI * r;
  auto lift = [r](const Vec2& uv) {
    const double theta = uv.x / r;
    return Vec3{r * std::cos(theta), r * std::sin(theta), uv.y};
  };

  Fixture f;
  f.pattern.name = "cylinder_panel";
  f.pattern.panels.push_back(rectangle_panel("body", "torso_front", w, h));
  // The vertical edges are the same 3D line: one self-stitch closes the tube.
  f.pattern.stitches.push_back({0, {"body", 1}, {"body", 3}});
  f.meshes.push_back(grid_mesh("body", w, h, p.n, lift));
  f.surface_distance = [r, h](const Vec3& q) {
    const double rho = std::hypot(q.x, q.y);
    const double dz = q.z < 0 ? -q.z : q.z > h ? q.z - h : 0.0;
    return std::hypot(rho - r, dz);
  };
  f.edge_samples = [pattern = f.pattern, lift](const std::string& id, int edge, int n) {
    return lifted_edge_samples(*pattern.find_panel(id), edge, n, lift);
  };
  return f;
}

Fixture make_two_square_stitched(const FixtureParams& p) {
  if (p.n < 2 || p.size <= 0) {
    throw Error(Errc::BadParams, "two_square_stitched needs n >= 2, size > 0");
  }
  const double s = p.size;
  auto lift_left = [](const Vec2& uv) { return Vec3{uv.x, uv.y, 0.0}; };
  auto lift_right = [s](const Vec2& uv) { return Vec3{uv.x + s, uv.y, 0.0}; };

  Fixture f;
  f.pattern.name = "two_square_stitched";
  f.pattern.panels.push_back(rectangle_panel("left", "torso_front_left", s, s));
  f.pattern.panels.push_back(rectangle_panel("right", "torso_front_right", s, s));
  Panel& right = f.pattern.panels.back();
  right.translation = {s, 0, 0};
  // Right edge of the left square meets the left edge of the right one.
  f.pattern.stitches.push_back({0, {"left", 1}, {"right", 3}});
  f.meshes.push_back(grid_mesh("left", s, s, p.n, lift_left));
  f.meshes.push_back(grid_mesh("right", s, s, p.n, lift_right));
  f.surface_distance = [](const Vec3& q) { return std::abs(q.z); };
  f.edge_samples = [pattern = f.pattern, lift_left, lift_right](const std::string& id, int edge,
                                                                int n) {
    const std::function<Vec3(const Vec2&)> lift =
        id == "left" ? std::function<Vec3(const Vec2&)>(lift_left)
                     : std::function<Vec3(const Vec2&)>(lift_right);
    return lifted_edge_samples(*pattern.find_panel(id), edge, n, lift);
  };
  return f;
}

Fixture make_dart_square(const FixtureParams& p) {
  const double s = p.size, w = p.dart_width, d = p.dart_depth;
  if (p.n < 2 || s <= 0 || w <= 0 || d <= 0 || 2 * w >= s || d >= s) {
    throw Error(Errc::BadParams, "dart_square params out of range");
  }
  Panel panel;
  panel.id = "front";
  panel.panel_type = "torso_front";
  panel.vertices = {{0, 0},          {s, 0},          {s, s},
                    {s / 2 + w, s},  {s / 2, s - d},  {s / 2 - w, s},
                    {0, s}};
  for (int i = 0; i < 7; ++i) panel.edges.emplace_back(i, (i + 1) % 7);

  // Closing the dart shears the material above the apex toward the dart
  // axis, so both dart edges land on the same 3D segment.
  auto lift = [s, w, d](const Vec2& uv) {
    double x = uv.x;
    if (uv.y > s - d) {
      const double t = (uv.y - (s - d)) / d;
      x += (uv.x < s / 2 ? w * t : -w * t);
    }
    return Vec3{x, uv.y, 0.0};
  };

  // Fan mesh: boundary subdivided k times per pattern edge (the polygon is
  // star-shaped from a point below the dart apex).
  PanelMesh m;
  m.panel_id = "front";
  const int k = std::max(2, p.n / 2);
  const int ne = static_cast<int>(panel.edges.size());
  const Vec2 center{s / 2, (s - d) / 2};
  m.uv.push_back(center);
  m.vertices3d.push_back(lift(center));
  std::vector<int> base(ne);
  for (int e = 0; e < ne; ++e) {
    base[e] = static_cast<int>(m.uv.size());
    const Vec2 a = panel.vertices[panel.edges[e].first];
    const Vec2 b = panel.vertices[panel.edges[e].second];
    for (int j = 0; j < k; ++j) {
      const Vec2 uv = a + (b - a) * (static_cast<double>(j) / k);
      m.uv.push_back(uv);
      m.vertices3d.push_back(lift(uv));
    }
  }
  m.boundary_edges.resize(ne);
  for (int e = 0; e < ne; ++e) {
    for (int j = 0; j < k; ++j) m.boundary_edges[e].push_back(base[e] + j);
    m.boundary_edges[e].push_back(base[(e + 1) % ne]);
  }
  const int nb = ne * k;  // boundary ring length, vertices 1..nb
  for (int i = 1; i <= nb; ++i) {
    m.faces.push_back({0, i, i % nb + 1});
  }

  Fixture f;
  f.pattern.name = "dart_square";
  f.pattern.panels.push_back(panel);
  // The two dart edges close onto each other.
  f.pattern.stitches.push_back({0, {"front", 3}, {"front", 4}});
  f.meshes.push_back(std::move(m));
  f.surface_distance = [](const Vec3& q) { return std::abs(q.z); };
  f.edge_samples = [pattern = f.pattern, lift](const std::string& id, int edge, int n) {
    return lifted_edge_samples(*pattern.find_panel(id), edge, n, lift);
  };
  return f;
}

Fixture make_multi_panel_skirt(const FixtureParams& p) {
  const double r1 = p.radius, r0 = p.top_radius, h = p.height;
  if (p.n < 2 || r1 <= 0 || r0 <= 0 || r0 >= r1 || h <= 0) {
    throw Error(Errc::BadParams, "multi_panel_skirt needs n >= 2, 0 < top_radius < radius, height > 0");
  }
  const double w1 = r1 * M_PI / 2.0;  // bottom arc length per quarter
  const double w0 = r0 * M_PI / 2.0;
  const double slant = std::hypot(r1 - r0, h);

  Fixture f;
  f.pattern.name = "multi_panel_skirt";
  static const char* kTypes[4] = {"skirt_front", "skirt_panel", "skirt_back", "skirt_panel"};
  std::vector<std::function<Vec3(const Vec2&)>> lifts;
  for (int q = 0; q < 4; ++q) {
    Panel panel;
    panel.id = "gore_" + std::to_string(q);
    panel.panel_type = kTypes[q];
    panel.vertices = {{0, 0}, {w1, 0}, {(w1 + w0) / 2, slant}, {(w1 - w0) / 2, slant}};
    panel.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    f.pattern.panels.push_back(panel);

    // Trapezoid (u, v) -> quarter q of the frustum: v climbs the slant,
    // u sweeps the angle within the row's shrinking width.
    auto lift = [q, w1, w0, slant, r1, r0, h](const Vec2& uv) {
      const double t = uv.y / slant;
      const double row_w = w1 + (w0 - w1) * t;
      const double row_x0 = (w1 - row_w) / 2.0;
      const double srow = row_w < 1e-12 ? 0.5 : (uv.x - row_x0) / row_w;
      const double theta = (q + srow) * M_PI / 2.0;
      const double r = r1 + (r0 - r1) * t;
      return Vec3{r * std::cos(theta), r * std::sin(theta), t * h};
    };
    lifts.push_back(lift);

    // Gore meshes live on the trapezoid: same grid as grid_mesh but with
    // the rows narrowing toward the top.
    PanelMesh m;
    m.panel_id = panel.id;
    const int n = p.n;
    auto vid = [n](int i, int j) { return j * n + i; };
    for (int j = 0; j < n; ++j) {
      const double t = static_cast<double>(j) / (n - 1);
      const double row_w = w1 + (w0 - w1) * t;
      const double row_x0 = (w1 - row_w) / 2.0;
      for (int i = 0; i < n; ++i) {
        const Vec2 uv{row_x0 + row_w * i / (n - 1), slant * t};
        m.uv.push_back(uv);
        m.vertices3d.push_back(lift(uv));
      }
    }
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        m.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
        m.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      }
    }
    m.boundary_edges.resize(4);
    for (int i = 0; i < n; ++i) m.boundary_edges[0].push_back(vid(i, 0));
    for (int j = 0; j < n; ++j) m.boundary_edges[1].push_back(vid(n - 1, j));
    for (int i = n - 1; i >= 0; --i) m.boundary_edges[2].push_back(vid(i, n - 1));
    for (int j = n - 1; j >= 0; --j) m.boundary_edges[3].push_back(vid(0, j));
    f.meshes.push_back(std::move(m));
  }
  for (int q = 0; q < 4; ++q) {
    f.pattern.stitches.push_back(
        {q, {"gore_" + std::to_string(q), 1}, {"gore_" + std::to_string((q + 1) % 4), 3}});
  }
  f.surface_distance = [r1, r0, h](const Vec3& q) {
    // Distance to the frustum's profile segment in the (rho, z) half-plane.
    const double rho = std::hypot(q.x, q.y);
    const double dx = r0 - r1, dz = h;
    double t = ((rho - r1) * dx + q.z * dz) / (dx * dx + dz * dz);
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(rho - (r1 + t * dx), q.z - t * dz);
  };
  f.edge_samples = [pattern = f.pattern, lifts](const std::string& id, int edge, int n) {
    for (size_t q = 0; q < 4; ++q) {
      if (id == "gore_" + std::to_string(q)) {
        return lifted_edge_samples(*pattern.find_panel(id), edge, n, lifts[q]);
      }
    }
    throw Error(Errc::BadParams, "unknown panel " + id);
  };
  return f;
}

}  // namespace

Fixture make_fixture(FixtureKind kind, const FixtureParams& params) {
  switch (kind) {
    case FixtureKind::kFlatGrid: return make_flat_grid(params);
    case FixtureKind::kCylinderPanel: return make_cylinder_panel(params);
    case FixtureKind::kTwoSquareStitched: return make_two_square_stitched(params);
    case FixtureKind::kDartSquare: return make_dart_square(params);
    case FixtureKind::kMultiPanelSkirt: return make_multi_panel_skirt(params);
  }
  throw Error(Errc::BadParams, "unknown fixture kind");
}

const char* fixture_kind_name(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::kFlatGrid: return "flat_grid";
    case FixtureKind::kCylinderPanel: return "cylinder_panel";
    case FixtureKind::kTwoSquareStitched: return "two_square_stitched";
    case FixtureKind::kDartSquare: return "dart_square";
    case FixtureKind::kMultiPanelSkirt: return "multi_panel_skirt";
  }
  return "unknown";
}

bool fixture_kind_from_name(const std::string& name, FixtureKind* out) {
  for (FixtureKind k : {FixtureKind::kFlatGrid, FixtureKind::kCylinderPanel,
                        FixtureKind::kTwoSquareStitched, FixtureKind::kDartSquare,
                        FixtureKind::kMultiPanelSkirt}) {
    if (name == fixture_kind_name(k)) {
      *out = k;
      return true;
    }
  }
  return false;
}

}  // namespace ggi
