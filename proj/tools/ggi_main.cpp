#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ggi/error.hpp"
#include "ggi/layout.hpp"
#include "ggi/mesh_io.hpp"
#include "ggi/metrics.hpp"
#include "ggi/pattern.hpp"
#include "ggi/raster.hpp"
#include "ggi/remesh.hpp"
#include "ggi/stitcher.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ggi::Error(ggi::Errc::Io, "cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

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

struct RunConfig {
  std::string input;
  std::string out;
  std::string fixture;
  int resolution = 512;
  int margin = 2;
  int n = 16;
  double size = 10.0;
  double radius = 10.0;
  double top_radius = 6.0;
  double height = 20.0;
  std::string dtw_cost = "3d";
  std::string mode = "hybrid";
  double alpha = ggi::kDefaultEdgeAlpha;
  int band = ggi::kDefaultEdgeBandWidth;
  uint64_t seed = 0;
  size_t samples = 10000;
  bool strict = false;
};

ggi::Fixture make_named_fixture(const RunConfig& cfg) {
  ggi::FixtureKind kind;
  if (!ggi::fixture_kind_from_name(cfg.fixture, &kind)) {
    throw ggi::Error(ggi::Errc::BadParams, "unknown fixture '" + cfg.fixture + "'");
  }
  ggi::FixtureParams p;
  p.n = cfg.n;
  p.size = cfg.size;
  p.radius = cfg.radius;
  p.top_radius = cfg.top_radius;
  p.height = cfg.height;
  return ggi::make_fixture(kind, p);
}

ggi::EncodeOptions encode_options(const RunConfig& cfg) {
  ggi::EncodeOptions opts;
  opts.resolution = cfg.resolution;
  opts.margin = cfg.margin;
  opts.strict = cfg.strict;
  opts.mode = cfg.mode == "barycentric" ? ggi::InterpolationMode::kBarycentricOnly
                                        : ggi::InterpolationMode::kHybrid;
  return opts;
}

ggi::DtwCostSpace dtw_cost_space(const RunConfig& cfg) {
  return cfg.dtw_cost == "uv" ? ggi::DtwCostSpace::kUv : ggi::DtwCostSpace::k3d;
}

int cmd_validate(const RunConfig& cfg) {
  std::vector<ggi::Violation> violations;
  ggi::parse_pattern(read_file(cfg.input), &violations);
  if (violations.empty()) {
    std::cout << "{\"valid\": true}\n";
    return 0;
  }
  for (const auto& v : violations) {
    std::cerr << ggi::violation_code_name(v.code) << " at " << v.where
              << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
  }
  std::cout << "{\"valid\": false, \"violations\": " << violations.size() << "}\n";
  return 1;
}

int cmd_pack(const RunConfig& cfg, double scale) {
  const auto pattern = ggi::parse_pattern(read_file(cfg.input));
  const auto layout = ggi::pack_layout(pattern, scale, cfg.margin);
  std::cout << ggi::layout_to_json(layout) << "\n";
  return 0;
}

int cmd_fixture(const RunConfig& cfg) {
  const auto fx = make_named_fixture(cfg);
  std::filesystem::create_directories(cfg.out);
  {
    std::ofstream f(cfg.out + "/pattern.json", std::ios::binary);
    if (!f) throw ggi::Error(ggi::Errc::Io, "cannot write " + cfg.out + "/pattern.json");
    f << ggi::serialize_pattern(fx.pattern);
  }
  for (const auto& pm : fx.meshes) {
    ggi::IndexedMesh m;
    m.vertices = pm.vertices3d;
    m.faces = pm.faces;
    ggi::export_obj(m, cfg.out + "/" + pm.panel_id + ".obj");
  }
  std::cout << "{\"fixture\": \"" << cfg.fixture << "\", \"panels\": " << fx.meshes.size()
            << "}\n";
  return 0;
}

int cmd_encode(const RunConfig& cfg) {
  const auto fx = make_named_fixture(cfg);
  const auto raster = ggi::encode(fx.pattern, fx.meshes, encode_options(cfg));
  ggi::write_ggi(raster, cfg.out);
  size_t valid = 0;
  for (uint8_t v : raster.valid) valid += v != 0;
  std::cout << "{\"side\": " << raster.side << ", \"resolution_scale\": "
            << g17(raster.layout.resolution_scale) << ", \"valid_pixels\": " << valid << "}\n";
  return 0;
}

int cmd_decode(const RunConfig& cfg) {
  const auto t_io0 = Clock::now();
  const auto raster = ggi::read_ggi(cfg.input);
  const double io_read_s = seconds_since(t_io0);

  const auto t_core = Clock::now();
  const auto result = ggi::assemble(raster, dtw_cost_space(cfg));
  const double core_s = seconds_since(t_core);

  const auto t_io1 = Clock::now();
  ggi::export_obj(result.mesh, cfg.out, raster.norm);
  const double io_write_s = seconds_since(t_io1);

  const auto stats = ggi::mesh_stats(result.mesh);
  std::cout << "{\"vertices\": " << stats.vertex_count << ", \"faces\": " << stats.face_count
            << ", \"boundary_edges\": " << stats.boundary_edge_count
            << ", \"non_manifold_edges\": " << stats.non_manifold_edge_count << "}\n";
  std::cout << ggi::seam_report_json(result.seams);
  // Timings go to stderr so stdout stays byte-reproducible.
  std::cerr << "{\"decode_core_s\": " << fmt6(core_s) << ", \"io_read_s\": " << fmt6(io_read_s)
            << ", \"io_write_s\": " << fmt6(io_write_s) << "}\n";
  return 0;
}

int cmd_roundtrip(const RunConfig& cfg) {
  const auto fx = make_named_fixture(cfg);
  const auto t_enc = Clock::now();
  const auto raster = ggi::encode(fx.pattern, fx.meshes, encode_options(cfg));
  const double encode_s = seconds_since(t_enc);

  const auto t_dec = Clock::now();
  const auto result = ggi::assemble(raster, dtw_cost_space(cfg));
  const double decode_s = seconds_since(t_dec);

  double surface_sum = 0.0, surface_max = 0.0;
  for (const auto& v : result.mesh.vertices) {
    const double d = fx.surface_distance(v);
    surface_sum += d;
    surface_max = std::max(surface_max, d);
  }
  const double chamfer =
      result.mesh.vertices.empty() ? 0.0 : surface_sum / result.mesh.vertices.size();
  double max_gap = 0.0;
  for (const auto& s : result.seams) max_gap = std::max(max_gap, s.max_pre_weld_gap_cm);
  const auto stats = ggi::mesh_stats(result.mesh);

  std::cout << "{\"fixture\": \"" << cfg.fixture << "\", \"chamfer_cm\": " << g17(chamfer)
            << ", \"surface_max_cm\": " << g17(surface_max)
            << ", \"pre_weld_max_gap_cm\": " << g17(max_gap)
            << ", \"non_manifold_edges\": " << stats.non_manifold_edge_count
            << ", \"vertices\": " << stats.vertex_count << ", \"faces\": " << stats.face_count
            << "}\n";
  std::cerr << "{\"encode_s\": " << fmt6(encode_s) << ", \"decode_s\": " << fmt6(decode_s)
            << "}\n";
  if (!cfg.out.empty()) ggi::export_obj(result.mesh, cfg.out, raster.norm);
  return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& pred_stem) {
  const auto gt = ggi::read_ggi(cfg.input);
  const auto pred = ggi::read_ggi(pred_stem);
  const double l1 = ggi::edge_aware_l1(gt, pred, cfg.alpha, cfg.band);
  std::cout << "{\"edge_aware_l1\": " << g17(l1);
  if (!gt.layout.placements.empty()) {
    bool any_stitch = false;
    for (uint8_t b : pred.stitching) {
      if (b) {
        any_stitch = true;
        break;
      }
    }
    if (any_stitch) std::cout << ", \"stitch_chamfer_cm\": " << g17(ggi::stitch_chamfer(pred));
  }
  std::cout << "}\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Garment geometry image codec: pack, rasterize, remesh, stitch"};
  app.require_subcommand(1);

  RunConfig cfg;
  double pack_scale = 1.0;
  std::string pred_stem;

  auto add_fixture_opts = [&](CLI::App* sub, bool required) {
    sub->add_option("--fixture", cfg.fixture,
                    "fixture kind: flat_grid, cylinder_panel, two_square_stitched, dart_square, "
                    "multi_panel_skirt")
        ->required(required);
    sub->add_option("--n", cfg.n, "fixture mesh grid resolution")->check(CLI::Range(2, 4096));
    sub->add_option("--size", cfg.size, "square fixtures: side length, cm");
    sub->add_option("--radius", cfg.radius, "cylinder/skirt: base radius, cm");
    sub->add_option("--top-radius", cfg.top_radius, "skirt: top radius, cm");
    sub->add_option("--height", cfg.height, "cylinder/skirt: height, cm");
  };
  auto add_encode_opts = [&](CLI::App* sub) {
    sub->add_option("--resolution", cfg.resolution, "target raster side, pixels")
        ->check(CLI::Range(32, 4096));
    sub->add_option("--margin", cfg.margin, "packing margin, pixels")->check(CLI::Range(1, 1024));
    sub->add_option("--mode", cfg.mode, "geometry interpolation: hybrid or barycentric")
        ->check(CLI::IsMember({"hybrid", "barycentric"}));
    sub->add_flag("--strict", cfg.strict, "reject unknown panel types");
  };
  auto add_decode_opts = [&](CLI::App* sub) {
    sub->add_option("--dtw-cost", cfg.dtw_cost, "DTW cost space: 3d or uv")
        ->check(CLI::IsMember({"3d", "uv"}));
  };

  auto* validate = app.add_subcommand("validate", "Check a pattern JSON against all invariants");
  validate->add_option("pattern", cfg.input, "pattern JSON path")->required();

  auto* pack = app.add_subcommand("pack", "Print the packed UV layout for a pattern");
  pack->add_option("pattern", cfg.input, "pattern JSON path")->required();
  pack->add_option("--scale", pack_scale, "pixels per cm");
  pack->add_option("--margin", cfg.margin, "packing margin, pixels")->check(CLI::Range(1, 1024));

  auto* fixture = app.add_subcommand("fixture", "Write a synthetic pattern + panel meshes");
  add_fixture_opts(fixture, true);
  fixture->add_option("--out", cfg.out, "output directory")->required();

  auto* encode = app.add_subcommand("encode", "Render a fixture into a geometry image triplet");
  add_fixture_opts(encode, true);
  add_encode_opts(encode);
  encode->add_option("--out", cfg.out, "output path stem")->required();

  auto* decode = app.add_subcommand("decode", "Rebuild a seam-closed mesh from a geometry image");
  decode->add_option("stem", cfg.input, "input path stem (as written by encode)")->required();
  decode->add_option("--out", cfg.out, "output OBJ path")->required();
  add_decode_opts(decode);

  auto* roundtrip = app.add_subcommand("roundtrip", "Encode then decode a fixture, report fidelity");
  add_fixture_opts(roundtrip, true);
  add_encode_opts(roundtrip);
  add_decode_opts(roundtrip);
  roundtrip->add_option("--seed", cfg.seed, "sampling seed");
  roundtrip->add_option("--out", cfg.out, "optional OBJ path for the decoded mesh");

  auto* eval = app.add_subcommand("eval", "Compare two geometry images");
  eval->add_option("gt", cfg.input, "ground-truth path stem")->required();
  eval->add_option("pred", pred_stem, "predicted path stem")->required();
  eval->add_option("--alpha", cfg.alpha, "edge band weight");
  eval->add_option("--band", cfg.band, "edge band width, pixels")->check(CLI::Range(0, 1024));

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(cfg);
    if (pack->parsed()) return cmd_pack(cfg, pack_scale);
    if (fixture->parsed()) return cmd_fixture(cfg);
    if (encode->parsed()) return cmd_encode(cfg);
    if (decode->parsed()) return cmd_decode(cfg);
    if (roundtrip->parsed()) return cmd_roundtrip(cfg);
    if (eval->parsed()) return cmd_eval(cfg, pred_stem);
  } catch (const ggi::Error& e) {
    std::cerr << ggi::errc_name(e.code()) << ": " << e.what() << "\n";
    return e.code() == ggi::Errc::InvariantViolation ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
