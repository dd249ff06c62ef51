#pragma once

#include <map>
#include <string>
#include <vector>

#include "ggi/pattern.hpp"
#include "ggi/vec.hpp"

namespace ggi {

struct Placement {
  int origin_x = 0, origin_y = 0;  // content rectangle, pixels
  int width = 0, height = 0;
  bool flipped = false;  // horizontal mirror inside the rectangle
};

/// Square UV arrangement of all panel bounding boxes.
struct PackedLayout {
  int side = 0;  // pixels
  double resolution_scale = 1.0;  // pixels per cm
  int margin = 2;  // pixels of clearance around each content rectangle
  std::map<std::string, Placement> placements;

  static Vec3 layout_normal() { return {0.0, 0.0, 1.0}; }
};

/// Maps between panel pattern space (cm) and layout pixel space for one
/// placement. Pixel (ix, iy) samples the pattern point at the pixel center.
struct PanelFrame {
  Placement placement;
  Vec2 bbox_min, bbox_max;
  double scale = 1.0;

  PanelFrame() = default;
  PanelFrame(const Panel& panel, const Placement& pl, double resolution_scale);

  /// Pattern point (cm) -> continuous pixel coordinates.
  Vec2 to_uv(const Vec2& p) const;
  /// Nearest pixel of a pattern point, clamped into the content rectangle.
  std::pair<int, int> to_pixel(const Vec2& p) const;
  /// Pattern-space sample point of pixel (ix, iy).
  Vec2 sample_point(int ix, int iy) const;
  bool contains_pixel(int ix, int iy) const;
};

/// Rectangle with margin already applied; used by the shelf heuristic.
struct PackRect {
  std::string panel_id;
  int width = 0, height = 0;  // inflated by margin on all sides
};

/// Deterministic row-wise shelf placement: rects sorted by decreasing
/// height, then width, then id; shelves bottom-to-top, left-to-right.
/// Returns true and fills origins (of the inflated rects) when all fit.
bool shelf_pack(const std::vector<PackRect>& sorted_rects, int side,
                std::vector<std::pair<int, int>>* origins);

/// Sorts rects by the shelf heuristic's order.
void sort_pack_rects(std::vector<PackRect>* rects);

/// Packs all panels into the minimal square feasible for the shelf
/// heuristic (binary search over the side) and corrects orientation.
/// Throws EmptyPattern and DegeneratePanel.
PackedLayout pack_layout(const SewingPattern& pattern, double resolution_scale, int margin);

/// Sets each placement's `flipped` bit so that every panel's loop, lifted
/// by its rigid transform, faces the layout normal. Throws ZeroNormal.
PackedLayout correct_orientation(const SewingPattern& pattern, const PackedLayout& layout);

/// Content rectangle size (pixels) of a panel at the given scale.
/// Throws DegeneratePanel on zero-extent bounding boxes.
std::pair<int, int> panel_content_size(const Panel& panel, double resolution_scale);

/// Deterministic JSON fragment for the sidecar; stable key order.
std::string layout_to_json(const PackedLayout& layout);
PackedLayout layout_from_json(const std::string& json_text);

}  // namespace ggi
