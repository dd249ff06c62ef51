#include "ggi/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ggi/error.hpp"
#include "json.hpp"

namespace ggi {

PanelFrame::PanelFrame(const Panel& panel, const Placement& pl, double resolution_scale)
    : placement(pl),
      bbox_min(panel.bbox_min()),
      bbox_max(panel.bbox_max()),
      scale(resolution_scale) {}

Vec2 PanelFrame::to_uv(const Vec2& p) const {
  const double lx = placement.flipped ? (bbox_max.x - p.x) : (p.x - bbox_min.x);
  return {placement.origin_x + lx * scale - 0.5,
          placement.origin_y + (p.y - bbox_min.y) * scale - 0.5};
}

std::pair<int, int> PanelFrame::to_pixel(const Vec2& p) const {
  const Vec2 c = to_uv(p);
  int ix = static_cast<int>(std::floor(c.x + 0.5));
  int iy = static_cast<int>(std::floor(c.y + 0.5));
  ix = std::clamp(ix, placement.origin_x, placement.origin_x + placement.width - 1);
  iy = std::clamp(iy, placement.origin_y, placement.origin_y + placement.height - 1);
  return {ix, iy};
}

Vec2 PanelFrame::sample_point(int ix, int iy) const {
  const double lx = (ix - placement.origin_x + 0.5) / scale;
  const double x = placement.flipped ? (bbox_max.x - lx) : (bbox_min.x + lx);
  return {x, bbox_min.y + (iy - placement.origin_y + 0.5) / scale};
}

bool PanelFrame::contains_pixel(int ix, int iy) const {
  return ix >= placement.origin_x && ix < placement.origin_x + placement.width &&
         iy >= placement.origin_y && iy < placement.origin_y + placement.height;
}

std::pair<int, int> panel_content_size(const Panel& panel, double resolution_scale) {
  const Vec2 lo = panel.bbox_min();
  const Vec2 hi = panel.bbox_max();
  const double wx = (hi.x - lo.x) * resolution_scale;
  const double wy = (hi.y - lo.y) * resolution_scale;
  if (wx < 1e-9 || wy < 1e-9) {
    throw Error(Errc::DegeneratePanel,
                "panel '" + panel.id + "' has a zero-area bounding box after scaling");
  }
  return {static_cast<int>(std::ceil(wx - 1e-9)), static_cast<int>(std::ceil(wy - 1e-9))};
}

void sort_pack_rects(std::vector<PackRect>* rects) {
  std::sort(rects->begin(), rects->end(), [](const PackRect& a, const PackRect& b) {
    if (a.height != b.height) return a.height > b.height;
    if (a.width != b.width) return a.width > b.width;
    return a.panel_id < b.panel_id;
  });
}

bool shelf_pack(const std::vector<PackRect>& sorted_rects, int side,
                std::vector<std::pair<int, int>>* origins) {
  if (origins) {
    origins->clear();
    origins->reserve(sorted_rects.size());
  }
  int cur_x = 0, cur_y = 0, shelf_h = 0;
  for (const auto& r : sorted_rects) {
    if (r.width > side || r.height > side) return false;
    if (cur_x + r.width > side) {
      cur_y += shelf_h;
      cur_x = 0;
      shelf_h = 0;
    }
    if (cur_y + r.height > side) return false;
    if (origins) origins->emplace_back(cur_x, cur_y);
    shelf_h = std::max(shelf_h, r.height);
    cur_x += r.width;
  }
  return true;
}

PackedLayout pack_layout(const SewingPattern& pattern, double resolution_scale, int margin) {
  if (pattern.panels.empty()) {
    throw Error(Errc::EmptyPattern, "pattern has no panels");
  }
  if (resolution_scale <= 0.0 || margin < 1) {
    throw Error(Errc::BadParams, "resolution_scale must be > 0 and margin >= 1");
  }

  std::vector<PackRect> rects;
  rects.reserve(pattern.panels.size());
  for (const auto& panel : pattern.panels) {
    auto [w, h] = panel_content_size(panel, resolution_scale);
    rects.push_back({panel.id, w + 2 * margin, h + 2 * margin});
  }
  sort_pack_rects(&rects);

  int lo = 0, hi = 0;
  for (const auto& r : rects) {
    lo = std::max({lo, r.width, r.height});
    hi += r.height;
  }
  hi = std::max(hi, lo);
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (shelf_pack(rects, mid, nullptr)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }

  std::vector<std::pair<int, int>> origins;
  shelf_pack(rects, lo, &origins);

  PackedLayout layout;
  layout.side = lo;
  layout.resolution_scale = resolution_scale;
  layout.margin = margin;
  for (size_t i = 0; i < rects.size(); ++i) {
    Placement pl;
    pl.origin_x = origins[i].first + margin;
    pl.origin_y = origins[i].second + margin;
    pl.width = rects[i].width - 2 * margin;
    pl.height = rects[i].height - 2 * margin;
    layout.placements[rects[i].panel_id] = pl;
  }
  return correct_orientation(pattern, layout);
}

PackedLayout correct_orientation(const SewingPattern& pattern, const PackedLayout& layout) {
  PackedLayout out = layout;
  for (const auto& panel : pattern.panels) {
    auto it = out.placements.find(panel.id);
    if (it == out.placements.end()) {
      throw Error(Errc::BadParams, "layout missing placement for panel '" + panel.id + "'");
    }
    const Vec3 n = panel.world_normal();
    const double d = n.dot(PackedLayout::layout_normal());
    if (std::abs(d) < 1e-12) {
      throw Error(Errc::ZeroNormal,
                  "panel '" + panel.id + "' lies edge-on to the layout normal");
    }
    it->second.flipped = d < 0.0;
  }
  return out;
}

namespace {
// Shortest representation that round-trips the double exactly.
std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string layout_to_json(const PackedLayout& layout) {
  std::string out = "{\"side\": " + std::to_string(layout.side) +
                    ", \"resolution_scale\": " + g17(layout.resolution_scale) +
                    ", \"margin\": " + std::to_string(layout.margin) + ", \"placements\": {";
  bool first = true;
  for (const auto& [id, pl] : layout.placements) {
    if (!first) out += ", ";
    first = false;
    out += "\"" + id + "\": {\"origin\": [" + std::to_string(pl.origin_x) + ", " +
           std::to_string(pl.origin_y) + "], \"size\": [" + std::to_string(pl.width) + ", " +
           std::to_string(pl.height) + "], \"flipped\": " + (pl.flipped ? "true" : "false") + "}";
  }
  out += "}}";
  return out;
}

PackedLayout layout_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedJson, e.what());
  }
  try {
    PackedLayout layout;
    layout.side = j.at("side").get<int>();
    layout.resolution_scale = j.at("resolution_scale").get<double>();
    layout.margin = j.at("margin").get<int>();
    for (const auto& [id, jp] : j.at("placements").items()) {
      Placement pl;
      pl.origin_x = jp.at("origin")[0].get<int>();
      pl.origin_y = jp.at("origin")[1].get<int>();
      pl.width = jp.at("size")[0].get<int>();
      pl.height = jp.at("size")[1].get<int>();
      pl.flipped = jp.at("flipped").get<bool>();
      layout.placements[id] = pl;
    }
    return layout;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaViolation, e.what());
  }
}

}  // namespace ggi
