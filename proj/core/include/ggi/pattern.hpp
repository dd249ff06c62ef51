#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ggi/vec.hpp"

namespace ggi {

/// A single pattern piece: a simple closed polygon in pattern space (cm)
/// plus the rigid transform placing it in 3D.
struct Panel {
  std::string id;
  std::string panel_type;
  std::vector<Vec2> vertices;
  std::vector<std::pair<int, int>> edges;  // (start_index, end_index), closed loop
  Quat rotation;
  Vec3 translation;  // cm

  Vec2 bbox_min() const;
  Vec2 bbox_max() const;

  /// Twice the signed area of the vertex loop (positive = CCW).
  double signed_area2() const;

  /// Panel placement normal: local loop normal rotated into world space.
  /// Throws ZeroNormal on degenerate loops.
  Vec3 world_normal() const;
};

struct EdgeRef {
  std::string panel_id;
  int edge_index = 0;

  bool operator==(const EdgeRef& o) const {
    return panel_id == o.panel_id && edge_index == o.edge_index;
  }
};

struct Stitch {
  int id = 0;  // dense, 0-based
  EdgeRef edge_a;
  EdgeRef edge_b;
};

struct SewingPattern {
  std::string name;
  std::vector<Panel> panels;
  std::vector<Stitch> stitches;

  const Panel* find_panel(const std::string& id) const;
};

enum class ViolationCode {
  VertexEdgeCountMismatch,  // |V|=|E|
  NonClosedLoop,
  SelfIntersectingPanel,
  BadQuaternion,
  DuplicatePanelId,
  DanglingStitchRef,
  DuplicateEdgeUse,
  SelfStitch,
  NonDenseStitchIds,
  EmptyPanel,
};

const char* violation_code_name(ViolationCode c);

struct Violation {
  ViolationCode code;
  std::string where;   // panel or stitch id
  std::string detail;
};

/// Parses a ggi-pattern/1 JSON document. Throws MalformedJson on syntax
/// errors, SchemaViolation on missing/badly typed fields and
/// InvariantViolation naming the first failed invariant.
SewingPattern parse_pattern(const std::string& json_text);

/// As above, but invariant violations are returned through *violations
/// instead of being thrown; schema errors still throw.
SewingPattern parse_pattern(const std::string& json_text, std::vector<Violation>* violations);

/// Deterministic serialization: stable key order, floats to 6 decimals.
/// parse_pattern inverts it exactly.
std::string serialize_pattern(const SewingPattern& pattern);

/// Returns every invariant violation; empty iff the pattern is valid.
std::vector<Violation> validate_pattern(const SewingPattern& pattern);

}  // namespace ggi
