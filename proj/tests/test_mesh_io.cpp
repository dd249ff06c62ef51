#include <doctest.h>

#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ggi/error.hpp"
#include "ggi/mesh_io.hpp"
#include "ggi/remesh.hpp"

using namespace ggi;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ggi_meshio_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

IndexedMesh small_mesh() {
  IndexedMesh m;
  m.vertices = {{0, 0, 0}, {1.5, 0, 0.25}, {0, 2, -0.125}, {1, 1, 3}};
  m.faces = {{0, 1, 2}, {1, 3, 2}};
  m.uv_of_vertex = {{0, 0}, {3, 0}, {0, 4}, {2, 2}};
  m.panel_of_vertex = {"p", "p", "p", "p"};
  return m;
}

}  // namespace

TEST_CASE("obj export/import is a fixpoint and keeps the normalization") {
  TempDir tmp;
  const IndexedMesh mesh = small_mesh();
  const NormInfo norm{{1.25, -2.5, 3.75}, 12.5};
  const std::string path = tmp.file("mesh.obj");
  export_obj(mesh, path, norm);

  NormInfo back_norm;
  const IndexedMesh back = import_obj(path, &back_norm);
  CHECK(back_norm == norm);
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  REQUIRE(back.faces == mesh.faces);
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK(dist(back.vertices[i], mesh.vertices[i]) < 1e-6);
  }

  // Export of the imported mesh is byte-identical.
  const std::string path2 = tmp.file("mesh2.obj");
  export_obj(back, path2, back_norm);
  CHECK(slurp(path) == slurp(path2));
  CHECK(slurp(path).find("v 0.000000 0.000000 0.000000\n") != std::string::npos);
}

TEST_CASE("face indices outside 1..N are rejected") {
  TempDir tmp;
  const std::string path = tmp.file("bad_face.obj");
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n";
  try {
    import_obj(path);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IndexOutOfRange);
  }
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n";
  try {
    import_obj(path);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::IndexOutOfRange);
  }
}

TEST_CASE("malformed lines report their line number") {
  TempDir tmp;
  const std::string path = tmp.file("bad_line.obj");
  std::ofstream(path) << "v 0 0 0\nv 1 0 0\nv what\nf 1 2 3\n";
  try {
    import_obj(path);
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
}

TEST_CASE("missing file raises Io") {
  try {
    import_obj("/nonexistent/dir/never.obj");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
  }
}

TEST_CASE("a 100k-face mesh roundtrips in under a second") {
  // Grid of (n+1)^2 vertices, 2 n^2 faces; n = 224 gives ~100k faces.
  const int n = 224;
  IndexedMesh mesh;
  for (int y = 0; y <= n; ++y) {
    for (int x = 0; x <= n; ++x) {
      mesh.vertices.push_back({double(x), double(y), std::sin(x * 0.1) + std::cos(y * 0.1)});
      mesh.uv_of_vertex.emplace_back(x, y);
      mesh.panel_of_vertex.push_back("p");
    }
  }
  auto vid = [&](int x, int y) { return y * (n + 1) + x; };
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      mesh.faces.push_back({vid(x, y), vid(x + 1, y), vid(x + 1, y + 1)});
      mesh.faces.push_back({vid(x, y), vid(x + 1, y + 1), vid(x, y + 1)});
    }
  }
  REQUIRE(mesh.faces.size() == size_t(2) * n * n);

  TempDir tmp;
  const std::string path = tmp.file("big.obj");
  const auto t0 = std::chrono::steady_clock::now();
  export_obj(mesh, path);
  const IndexedMesh back = import_obj(path);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(back.faces.size() == mesh.faces.size());
  CHECK(back.vertices.size() == mesh.vertices.size());
  CHECK(secs < 1.0);
}

TEST_CASE("flat grid fixture: one square panel meshed as 2(n-1)^2 faces") {
  FixtureParams params;
  params.n = 8;
  const Fixture fx = make_fixture(FixtureKind::kFlatGrid, params);
  REQUIRE(fx.meshes.size() == 1);
  const PanelMesh& mesh = fx.meshes[0];
  CHECK(mesh.panel_id == "panel_0");
  CHECK(mesh.vertices3d.size() == 64);
  CHECK(mesh.faces.size() == 98);  // 2 * (8 - 1)^2
  CHECK(mesh.boundary_edges.size() == 4);
  for (const auto& chain : mesh.boundary_edges) CHECK(chain.size() == 8);
  for (const Vec3& v : mesh.vertices3d) CHECK(v.z == 0.0);
  // Every surface point is on the plane, by the fixture's own oracle.
  CHECK(fx.surface_distance({5.0, 5.0, 0.0}) == doctest::Approx(0.0));
  CHECK(fx.surface_distance({5.0, 5.0, 2.0}) == doctest::Approx(2.0));
}

TEST_CASE("cylinder fixture: the self-stitched edges coincide in 3D") {
  FixtureParams params;
  params.n = 24;
  const Fixture fx = make_fixture(FixtureKind::kCylinderPanel, params);
  REQUIRE(fx.meshes.size() == 1);
  const PanelMesh& mesh = fx.meshes[0];
  REQUIRE(fx.pattern.stitches.size() == 1);
  const int ea = fx.pattern.stitches[0].edge_a.edge_index;
  const int eb = fx.pattern.stitches[0].edge_b.edge_index;
  const auto& ca = mesh.boundary_edges[ea];
  const auto& cb = mesh.boundary_edges[eb];
  REQUIRE(!ca.empty());
  REQUIRE(ca.size() == cb.size());
  // The rolled rectangle meets itself: each seam vertex has a coincident
  // partner on the other chain.
  for (int va : ca) {
    double best = 1e300;
    for (int vb : cb) best = std::min(best, dist(mesh.vertices3d[va], mesh.vertices3d[vb]));
    CHECK(best < 1e-9);
  }
  // Mesh vertices sit on the analytic cylinder.
  for (const Vec3& v : mesh.vertices3d) CHECK(fx.surface_distance(v) < 1e-9);
}

TEST_CASE("two-square fixture stitches chains of equal length") {
  const Fixture fx = make_fixture(FixtureKind::kTwoSquareStitched);
  REQUIRE(fx.meshes.size() == 2);
  REQUIRE(fx.pattern.stitches.size() == 1);
  const Stitch& st = fx.pattern.stitches[0];
  const PanelMesh* ma = nullptr;
  const PanelMesh* mb = nullptr;
  for (const PanelMesh& m : fx.meshes) {
    if (m.panel_id == st.edge_a.panel_id) ma = &m;
    if (m.panel_id == st.edge_b.panel_id) mb = &m;
  }
  REQUIRE(ma);
  REQUIRE(mb);
  const auto& ca = ma->boundary_edges[st.edge_a.edge_index];
  const auto& cb = mb->boundary_edges[st.edge_b.edge_index];
  CHECK(ca.size() == cb.size());
  // Seam vertices coincide in 3D (the squares are laid out continuous).
  for (int va : ca) {
    double best = 1e300;
    for (int vb : cb) best = std::min(best, dist(ma->vertices3d[va], mb->vertices3d[vb]));
    CHECK(best < 1e-9);
  }
}

TEST_CASE("skirt fixture: four gores, cyclic stitches, frustum oracle") {
  const Fixture fx = make_fixture(FixtureKind::kMultiPanelSkirt);
  CHECK(fx.meshes.size() == 4);
  CHECK(fx.pattern.panels.size() == 4);
  CHECK(fx.pattern.stitches.size() == 4);
  CHECK(validate_pattern(fx.pattern).empty());
  for (const PanelMesh& m : fx.meshes) {
    for (const Vec3& v : m.vertices3d) CHECK(fx.surface_distance(v) < 1e-9);
  }
}

TEST_CASE("fixture parameter validation") {
  FixtureParams params;
  params.n = 1;
  try {
    make_fixture(FixtureKind::kFlatGrid, params);
    FAIL("expected BadParams");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadParams);
  }
  params = {};
  params.size = -1.0;
  try {
    make_fixture(FixtureKind::kFlatGrid, params);
    FAIL("expected BadParams");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadParams);
  }
}

TEST_CASE("fixture kind names roundtrip") {
  for (FixtureKind kind : {FixtureKind::kFlatGrid, FixtureKind::kCylinderPanel,
                           FixtureKind::kTwoSquareStitched, FixtureKind::kDartSquare,
                           FixtureKind::kMultiPanelSkirt}) {
    FixtureKind back;
    REQUIRE(fixture_kind_from_name(fixture_kind_name(kind), &back));
    CHECK(back == kind);
  }
  FixtureKind k;
  CHECK_FALSE(fixture_kind_from_name("no_such_fixture", &k));
}
