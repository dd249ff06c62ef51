#include "ggi/raster.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>

#include "ggi/error.hpp"
#include "ggi/parallel.hpp"
#include "json.hpp"
#include "png_io.hpp"

namespace ggi {

namespace {

constexpr uint32_t kInvalidBits = 0x7FC00000u;  // quiet NaN marks invalid on disk

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    if ((b.y > p.y) != (a.y > p.y)) {
      const double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
      if (p.x < xint) inside = !inside;
    }
  }
  return inside;
}

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

double dist_to_boundary(const std::vector<Vec2>& poly, const Vec2& p) {
  double d = 1e300;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    d = std::min(d, dist_point_segment(p, poly[i], poly[(i + 1) % n]));
  }
  return d;
}

std::vector<Vec2> loop_vertices(const Panel& panel) {
  std::vector<Vec2> poly;
  poly.reserve(panel.edges.size());
  for (const auto& e : panel.edges) poly.push_back(panel.vertices[e.first]);
  return poly;
}

void put_rgb(std::vector<uint8_t>* img, int side, int x, int y, Rgb8 c) {
  const size_t i = (static_cast<size_t>(y) * side + x) * 3;
  (*img)[i] = c.r;
  (*img)[i + 1] = c.g;
  (*img)[i + 2] = c.b;
}

/// Ordered, deduplicated pixels of one pattern edge's one-pixel band,
/// sampled at 0.5 px steps so the band has no gaps.
std::vector<std::pair<int, int>> edge_band_pixels(const PanelFrame& frame, const Vec2& a,
                                                  const Vec2& b) {
  const Vec2 ua = frame.to_uv(a);
  const Vec2 ub = frame.to_uv(b);
  const double len = (ub - ua).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
  std::vector<std::pair<int, int>> pixels;
  std::set<std::pair<int, int>> seen;
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    const Vec2 c = ua + (ub - ua) * t;
    int ix = static_cast<int>(std::floor(c.x + 0.5));
    int iy = static_cast<int>(std::floor(c.y + 0.5));
    ix = std::clamp(ix, frame.placement.origin_x,
                    frame.placement.origin_x + frame.placement.width - 1);
    iy = std::clamp(iy, frame.placement.origin_y,
                    frame.placement.origin_y + frame.placement.height - 1);
    if (seen.insert({ix, iy}).second) pixels.emplace_back(ix, iy);
  }
  return pixels;
}

bool pixels_adjacent(const std::pair<int, int>& a, const std::pair<int, int>& b) {
  return std::abs(a.first - b.first) <= 1 && std::abs(a.second - b.second) <= 1;
}

// Keeps the two bands of one stitch 8-disconnected. Dart edges share a
// corner in UV; their bands would otherwise merge into one component.
void separate_bands(std::vector<std::pair<int, int>>* a, std::vector<std::pair<int, int>>* b) {
  // Drop pixels present in both bands.
  std::set<std::pair<int, int>> sa(a->begin(), a->end());
  std::set<std::pair<int, int>> sb(b->begin(), b->end());
  auto drop_shared = [&](std::vector<std::pair<int, int>>* v,
                         const std::set<std::pair<int, int>>& other) {
    v->erase(std::remove_if(v->begin(), v->end(),
                            [&](const auto& p) { return other.count(p) != 0; }),
             v->end());
  };
  std::set<std::pair<int, int>> shared;
  for (const auto& p : sa) {
    if (sb.count(p)) shared.insert(p);
  }
  drop_shared(a, shared);
  drop_shared(b, shared);

  bool changed = true;
  while (changed) {
    changed = false;
    auto touches = [](const std::pair<int, int>& p, const std::vector<std::pair<int, int>>& v) {
      for (const auto& q : v) {
        if (pixels_adjacent(p, q)) return true;
      }
      return false;
    };
    for (auto* v : {a, b}) {
      const auto& other = (v == a) ? *b : *a;
      while (!v->empty() && touches(v->front(), other)) {
        v->erase(v->begin());
        changed = true;
      }
      while (!v->empty() && touches(v->back(), other)) {
        v->pop_back();
        changed = true;
      }
    }
  }
}

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

bool GgiRaster::operator==(const GgiRaster& o) const {
  return side == o.side && semantic == o.semantic && stitching == o.stitching &&
         geometry == o.geometry && valid == o.valid && norm == o.norm &&
         layout.side == o.layout.side && layout.margin == o.layout.margin &&
         layout.resolution_scale == o.layout.resolution_scale &&
         layout_to_json(layout) == layout_to_json(o.layout);
}

std::vector<uint8_t> render_semantic(const PackedLayout& layout, const SewingPattern& pattern,
                                     bool strict) {
  std::vector<uint8_t> img(static_cast<size_t>(layout.side) * layout.side * 3, 0);
  // Resolve colors up front so strict-mode errors fire before any work.
  std::vector<Rgb8> colors;
  colors.reserve(pattern.panels.size());
  for (const auto& panel : pattern.panels) {
    colors.push_back(panel_type_color(panel.panel_type, strict));
    if (layout.placements.find(panel.id) == layout.placements.end()) {
      throw Error(Errc::BadParams, "layout missing placement for panel '" + panel.id + "'");
    }
  }
  parallel_for(pattern.panels.size(), [&](size_t pi) {
    const Panel& panel = pattern.panels[pi];
    const Placement& pl = layout.placements.at(panel.id);
    const PanelFrame frame(panel, pl, layout.resolution_scale);
    const auto poly = loop_vertices(panel);
    const double band = 0.71 / layout.resolution_scale;  // half-pixel diagonal, cm
    for (int iy = pl.origin_y; iy < pl.origin_y + pl.height; ++iy) {
      for (int ix = pl.origin_x; ix < pl.origin_x + pl.width; ++ix) {
        const Vec2 p = frame.sample_point(ix, iy);
        if (point_in_polygon(poly, p) || dist_to_boundary(poly, p) <= band) {
          put_rgb(&img, layout.side, ix, iy, colors[pi]);
        }
      }
    }
  });
  return img;
}

std::vector<uint8_t> render_stitching(const PackedLayout& layout, const SewingPattern& pattern) {
  std::vector<uint8_t> img(static_cast<size_t>(layout.side) * layout.side * 3, 0);
  for (const auto& stitch : pattern.stitches) {
    const Rgb8 color = stitch_color(stitch.id);
    auto band_of = [&](const EdgeRef& ref) {
      const Panel* panel = pattern.find_panel(ref.panel_id);
      const PanelFrame frame(*panel, layout.placements.at(panel->id), layout.resolution_scale);
      const auto& e = panel->edges[ref.edge_index];
      return edge_band_pixels(frame, panel->vertices[e.first], panel->vertices[e.second]);
    };
    auto band_a = band_of(stitch.edge_a);
    auto band_b = band_of(stitch.edge_b);
    separate_bands(&band_a, &band_b);
    for (const auto& [x, y] : band_a) put_rgb(&img, layout.side, x, y, color);
    for (const auto& [x, y] : band_b) put_rgb(&img, layout.side, x, y, color);
  }
  return img;
}

void render_geometry(const PackedLayout& layout, const SewingPattern& pattern,
                     const std::vector<PanelMesh>& meshes, InterpolationMode mode,
                     GgiRaster* raster) {
  const int side = layout.side;
  raster->side = side;
  raster->layout = layout;
  raster->geometry.assign(static_cast<size_t>(side) * side * 3, 0.0f);
  raster->valid.assign(static_cast<size_t>(side) * side, 0);

  // Normalization over all panels' world vertices.
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const auto& mesh : meshes) {
    for (const auto& v : mesh.vertices3d) {
      if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
        throw Error(Errc::NonFiniteVertex, "panel '" + mesh.panel_id + "'");
      }
      lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
      hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
  }
  if (meshes.empty()) throw Error(Errc::EmptyRaster, "no panel meshes");
  NormInfo norm;
  norm.offset = (lo + hi) * 0.5;
  norm.scale = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z}) * 0.5;
  if (norm.scale < 1e-12) norm.scale = 1.0;
  raster->norm = norm;

  auto write_pixel = [&](int x, int y, const Vec3& world) {
    const Vec3 n = norm.normalize(world);
    const size_t i = raster->idx(x, y);
    raster->geometry[i * 3] = static_cast<float>(n.x);
    raster->geometry[i * 3 + 1] = static_cast<float>(n.y);
    raster->geometry[i * 3 + 2] = static_cast<float>(n.z);
    raster->valid[i] = 1;
  };

  // Validate before the parallel section; workers never throw.
  for (const auto& mesh : meshes) {
    const Panel* panel = pattern.find_panel(mesh.panel_id);
    if (!panel) throw Error(Errc::BadParams, "mesh for unknown panel '" + mesh.panel_id + "'");
    if (layout.placements.find(mesh.panel_id) == layout.placements.end()) {
      throw Error(Errc::BadParams, "layout missing placement for panel '" + mesh.panel_id + "'");
    }
    if (mesh.uv.size() != mesh.vertices3d.size()) {
      throw Error(Errc::ShapeMismatch, "panel '" + mesh.panel_id + "': |uv| != |vertices|");
    }
    const Vec2 bmin = panel->bbox_min();
    const Vec2 bmax = panel->bbox_max();
    for (const auto& u : mesh.uv) {
      if (u.x < bmin.x - 1e-6 || u.x > bmax.x + 1e-6 || u.y < bmin.y - 1e-6 ||
          u.y > bmax.y + 1e-6) {
        throw Error(Errc::UvOutsidePlacement, "panel '" + mesh.panel_id + "'");
      }
    }
  }

  parallel_for(meshes.size(), [&](size_t mi) {
    const PanelMesh& mesh = meshes[mi];
    const Panel* panel = pattern.find_panel(mesh.panel_id);
    const Placement& pl = layout.placements.at(mesh.panel_id);
    const PanelFrame frame(*panel, pl, layout.resolution_scale);

    // Pass 1: barycentric interior fill.
    for (const auto& face : mesh.faces) {
      const Vec2 ua = frame.to_uv(mesh.uv[face[0]]);
      const Vec2 ub = frame.to_uv(mesh.uv[face[1]]);
      const Vec2 uc = frame.to_uv(mesh.uv[face[2]]);
      const double denom = (ub - ua).cross(uc - ua);
      if (std::abs(denom) < 1e-12) continue;
      const int x0 = std::max(pl.origin_x,
                              static_cast<int>(std::floor(std::min({ua.x, ub.x, uc.x}))));
      const int x1 = std::min(pl.origin_x + pl.width - 1,
                              static_cast<int>(std::ceil(std::max({ua.x, ub.x, uc.x}))));
      const int y0 = std::max(pl.origin_y,
                              static_cast<int>(std::floor(std::min({ua.y, ub.y, uc.y}))));
      const int y1 = std::min(pl.origin_y + pl.height - 1,
                              static_cast<int>(std::ceil(std::max({ua.y, ub.y, uc.y}))));
      for (int iy = y0; iy <= y1; ++iy) {
        for (int ix = x0; ix <= x1; ++ix) {
          const Vec2 p{static_cast<double>(ix), static_cast<double>(iy)};
          const double w0 = (ub - p).cross(uc - p) / denom;
          const double w1 = (uc - p).cross(ua - p) / denom;
          const double w2 = (ua - p).cross(ub - p) / denom;
          if (w0 < -1e-9 || w1 < -1e-9 || w2 < -1e-9) continue;
          write_pixel(ix, iy,
                      mesh.vertices3d[face[0]] * w0 + mesh.vertices3d[face[1]] * w1 +
                          mesh.vertices3d[face[2]] * w2);
        }
      }
    }

    // Pass 2: vertex rasterization overrides barycentric values.
    for (size_t vi = 0; vi < mesh.uv.size(); ++vi) {
      const auto [ix, iy] = frame.to_pixel(mesh.uv[vi]);
      write_pixel(ix, iy, mesh.vertices3d[vi]);
    }

    // Pass 3: boundary chains, linear between chain vertices; wins at
    // conflicting pixels.
    if (mode == InterpolationMode::kHybrid) {
      for (const auto& chain : mesh.boundary_edges) {
        for (size_t k = 0; k + 1 < chain.size(); ++k) {
          const int va = chain[k];
          const int vb = chain[k + 1];
          const Vec2 ua = frame.to_uv(mesh.uv[va]);
          const Vec2 ub = frame.to_uv(mesh.uv[vb]);
          const double len = (ub - ua).norm();
          const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
          for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            const Vec2 c = ua + (ub - ua) * t;
            int ix = static_cast<int>(std::floor(c.x + 0.5));
            int iy = static_cast<int>(std::floor(c.y + 0.5));
            ix = std::clamp(ix, pl.origin_x, pl.origin_x + pl.width - 1);
            iy = std::clamp(iy, pl.origin_y, pl.origin_y + pl.height - 1);
            write_pixel(ix, iy,
                        mesh.vertices3d[va] * (1.0 - t) + mesh.vertices3d[vb] * t);
          }
        }
      }
    }
  });
}

GgiRaster encode(const SewingPattern& pattern, const std::vector<PanelMesh>& meshes,
                 const EncodeOptions& opts) {
  if (pattern.panels.empty()) throw Error(Errc::EmptyPattern, "pattern has no panels");

  // Find the largest resolution_scale whose minimal packed square fits the
  // target, then pad the side up to it.
  auto side_at = [&](double s) { return pack_layout(pattern, s, opts.margin).side; };
  double s_fit = 1.0;
  if (side_at(s_fit) > opts.resolution) {
    while (s_fit > 1e-7 && side_at(s_fit) > opts.resolution) s_fit *= 0.5;
    if (side_at(s_fit) > opts.resolution) {
      throw Error(Errc::BadParams, "target resolution too small for this pattern");
    }
  }
  double s_lo = s_fit, s_hi = s_fit;
  while (side_at(s_hi * 2.0) <= opts.resolution) s_hi *= 2.0;
  s_hi *= 2.0;
  for (int it = 0; it < 48; ++it) {
    const double mid = 0.5 * (s_lo + s_hi);
    if (side_at(mid) <= opts.resolution) {
      s_lo = mid;
    } else {
      s_hi = mid;
    }
  }

  PackedLayout layout = pack_layout(pattern, s_lo, opts.margin);
  layout.side = opts.resolution;

  GgiRaster raster;
  render_geometry(layout, pattern, meshes, opts.mode, &raster);
  raster.semantic = render_semantic(layout, pattern, opts.strict);
  raster.stitching = render_stitching(layout, pattern);

  // Occupancy alignment: every valid pixel must carry a panel color.
  for (const auto& panel : pattern.panels) {
    const Placement& pl = layout.placements.at(panel.id);
    const Rgb8 color = panel_type_color(panel.panel_type, opts.strict);
    for (int iy = pl.origin_y; iy < pl.origin_y + pl.height; ++iy) {
      for (int ix = pl.origin_x; ix < pl.origin_x + pl.width; ++ix) {
        if (raster.is_valid(ix, iy) && raster.semantic_at(ix, iy) == kBackground) {
          put_rgb(&raster.semantic, raster.side, ix, iy, color);
        }
      }
    }
  }
  return raster;
}

void write_ggi(const GgiRaster& raster, const std::string& path_stem) {
  detail::write_png_rgb8(path_stem + ".semantic.png", raster.side, raster.side, raster.semantic);
  detail::write_png_rgb8(path_stem + ".stitch.png", raster.side, raster.side, raster.stitching);

  {
    std::ofstream f(path_stem + ".geom.f32", std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot open '" + path_stem + ".geom.f32'");
    f.write("GGI1", 4);
    const uint32_t side = static_cast<uint32_t>(raster.side);
    f.write(reinterpret_cast<const char*>(&side), 4);
    uLong crc = crc32(0L, nullptr, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(&side), 4);
    const size_t npx = static_cast<size_t>(raster.side) * raster.side;
    std::vector<uint32_t> plane(npx);
    for (int c = 0; c < 3; ++c) {
      for (size_t i = 0; i < npx; ++i) {
        if (raster.valid[i]) {
          std::memcpy(&plane[i], &raster.geometry[i * 3 + c], 4);
        } else {
          plane[i] = kInvalidBits;
        }
      }
      f.write(reinterpret_cast<const char*>(plane.data()), npx * 4);
      crc = crc32(crc, reinterpret_cast<const Bytef*>(plane.data()),
                  static_cast<uInt>(npx * 4));
    }
    const uint32_t crc_le = static_cast<uint32_t>(crc);
    f.write(reinterpret_cast<const char*>(&crc_le), 4);
    if (!f) throw Error(Errc::Io, "write failed for '" + path_stem + ".geom.f32'");
  }

  {
    std::ofstream f(path_stem + ".ggi.json");
    if (!f) throw Error(Errc::Io, "cannot open '" + path_stem + ".ggi.json'");
    f << "{\"format\": \"ggi-raster/1\", \"side\": " << raster.side << ",\n"
      << " \"norm\": {\"offset\": [" << g17(raster.norm.offset.x) << ", "
      << g17(raster.norm.offset.y) << ", " << g17(raster.norm.offset.z)
      << "], \"scale\": " << g17(raster.norm.scale) << "},\n"
      << " \"layout\": " << layout_to_json(raster.layout) << ",\n"
      << " \"palette\": {\"panel\": " << panel_palette_hash()
      << ", \"stitch\": " << stitch_palette_hash() << "}}\n";
    if (!f) throw Error(Errc::Io, "write failed for '" + path_stem + ".ggi.json'");
  }
}

GgiRaster read_ggi(const std::string& path_stem) {
  GgiRaster raster;

  {
    std::ifstream f(path_stem + ".ggi.json");
    if (!f) throw Error(Errc::Io, "cannot open '" + path_stem + ".ggi.json'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
      if (j.at("format").get<std::string>() != "ggi-raster/1") {
        throw Error(Errc::FormatVersionMismatch, "unsupported sidecar format");
      }
      raster.side = j.at("side").get<int>();
      raster.norm.offset = {j.at("norm").at("offset")[0].get<double>(),
                            j.at("norm").at("offset")[1].get<double>(),
                            j.at("norm").at("offset")[2].get<double>()};
      raster.norm.scale = j.at("norm").at("scale").get<double>();
      raster.layout = layout_from_json(j.at("layout").dump());
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::FormatVersionMismatch, std::string("bad sidecar: ") + e.what());
    }
  }

  int w = 0, h = 0;
  raster.semantic = detail::read_png_rgb8(path_stem + ".semantic.png", &w, &h);
  if (w != raster.side || h != raster.side) {
    throw Error(Errc::FormatVersionMismatch, "semantic image does not match sidecar side");
  }
  raster.stitching = detail::read_png_rgb8(path_stem + ".stitch.png", &w, &h);
  if (w != raster.side || h != raster.side) {
    throw Error(Errc::FormatVersionMismatch, "stitch image does not match sidecar side");
  }

  {
    std::ifstream f(path_stem + ".geom.f32", std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot open '" + path_stem + ".geom.f32'");
    char magic[4];
    uint32_t side = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&side), 4);
    if (!f || std::memcmp(magic, "GGI1", 4) != 0) {
      throw Error(Errc::FormatVersionMismatch, "bad geometry file magic");
    }
    if (static_cast<int>(side) != raster.side) {
      throw Error(Errc::FormatVersionMismatch, "geometry side does not match sidecar");
    }
    const size_t npx = static_cast<size_t>(side) * side;
    std::vector<uint32_t> planes(npx * 3);
    f.read(reinterpret_cast<char*>(planes.data()), npx * 12);
    uint32_t stored_crc = 0;
    f.read(reinterpret_cast<char*>(&stored_crc), 4);
    if (!f) throw Error(Errc::ChecksumMismatch, "geometry file truncated");
    uLong crc = crc32(0L, nullptr, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(&side), 4);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(planes.data()),
                static_cast<uInt>(npx * 12));
    if (static_cast<uint32_t>(crc) != stored_crc) {
      throw Error(Errc::ChecksumMismatch, "geometry CRC mismatch");
    }
    raster.geometry.assign(npx * 3, 0.0f);
    raster.valid.assign(npx, 0);
    for (size_t i = 0; i < npx; ++i) {
      const bool ok = planes[i] != kInvalidBits;
      raster.valid[i] = ok ? 1 : 0;
      if (ok) {
        for (int c = 0; c < 3; ++c) {
          std::memcpy(&raster.geometry[i * 3 + c], &planes[c * npx + i], 4);
        }
      }
    }
  }
  return raster;
}

}  // namespace ggi
