#include "ggi/pattern.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_set>

#include "ggi/error.hpp"
#include "json.hpp"

namespace ggi {

namespace {

constexpr double kQuatTolerance = 1e-6;

std::string fnum(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string escape_json(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Proper intersection test between segments ab and cd, tolerant of shared
// endpoints (those are filtered by the caller for adjacent edges).
bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return (q - p).cross(r - p);
  };
  const double eps = 1e-12;
  double o1 = orient(a, b, c);
  double o2 = orient(a, b, d);
  double o3 = orient(c, d, a);
  double o4 = orient(c, d, b);
  if (((o1 > eps && o2 < -eps) || (o1 < -eps && o2 > eps)) &&
      ((o3 > eps && o4 < -eps) || (o3 < -eps && o4 > eps))) {
    return true;
  }
  // Collinear overlap.
  auto on_segment = [&](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::abs(orient(p, q, r)) <= eps &&
           r.x >= std::min(p.x, q.x) - eps && r.x <= std::max(p.x, q.x) + eps &&
           r.y >= std::min(p.y, q.y) - eps && r.y <= std::max(p.y, q.y) + eps;
  };
  auto is_endpoint = [&](const Vec2& p, const Vec2& u, const Vec2& v) {
    return (p - u).norm() <= eps || (p - v).norm() <= eps;
  };
  if (on_segment(a, b, c) && !is_endpoint(c, a, b)) return true;
  if (on_segment(a, b, d) && !is_endpoint(d, a, b)) return true;
  if (on_segment(c, d, a) && !is_endpoint(a, c, d)) return true;
  if (on_segment(c, d, b) && !is_endpoint(b, c, d)) return true;
  return false;
}

}  // namespace

Vec2 Panel::bbox_min() const {
  Vec2 m{1e300, 1e300};
  for (const auto& v : vertices) {
    m.x = std::min(m.x, v.x);
    m.y = std::min(m.y, v.y);
  }
  return m;
}

Vec2 Panel::bbox_max() const {
  Vec2 m{-1e300, -1e300};
  for (const auto& v : vertices) {
    m.x = std::max(m.x, v.x);
    m.y = std::max(m.y, v.y);
  }
  return m;
}

double Panel::signed_area2() const {
  double a = 0.0;
  const size_t n = vertices.size();
  for (size_t i = 0; i < n; ++i) {
    a += vertices[i].cross(vertices[(i + 1) % n]);
  }
  return a;
}

Vec3 Panel::world_normal() const {
  const double a2 = signed_area2();
  if (vertices.size() < 3 || a2 == 0.0) {
    throw Error(Errc::ZeroNormal, "panel '" + id + "' has a degenerate loop");
  }
  const Vec3 local{0.0, 0.0, a2 > 0.0 ? 1.0 : -1.0};
  return rotation.rotate(local);
}

const Panel* SewingPattern::find_panel(const std::string& id) const {
  for (const auto& p : panels) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

const char* violation_code_name(ViolationCode c) {
  switch (c) {
    case ViolationCode::VertexEdgeCountMismatch: return "VertexEdgeCountMismatch";
    case ViolationCode::NonClosedLoop: return "NonClosedLoop";
    case ViolationCode::SelfIntersectingPanel: return "SelfIntersectingPanel";
    case ViolationCode::BadQuaternion: return "BadQuaternion";
    case ViolationCode::DuplicatePanelId: return "DuplicatePanelId";
    case ViolationCode::DanglingStitchRef: return "DanglingStitchRef";
    case ViolationCode::DuplicateEdgeUse: return "DuplicateEdgeUse";
    case ViolationCode::SelfStitch: return "SelfStitch";
    case ViolationCode::NonDenseStitchIds: return "NonDenseStitchIds";
    case ViolationCode::EmptyPanel: return "EmptyPanel";
  }
  return "Unknown";
}

std::vector<Violation> validate_pattern(const SewingPattern& pattern) {
  std::vector<Violation> out;
  std::unordered_set<std::string> seen_ids;
  for (const auto& panel : pattern.panels) {
    if (!seen_ids.insert(panel.id).second) {
      out.push_back({ViolationCode::DuplicatePanelId, panel.id, "panel id reused"});
    }
    if (panel.vertices.size() < 3) {
      out.push_back({ViolationCode::EmptyPanel, panel.id, "fewer than 3 vertices"});
      continue;
    }
    const size_t n = panel.vertices.size();
    if (panel.edges.size() != n) {
      out.push_back({ViolationCode::VertexEdgeCountMismatch, panel.id, "|V|=|E|"});
      continue;
    }
    bool closed = true;
    std::set<int> starts;
    for (size_t k = 0; k < n; ++k) {
      const auto& [s, e] = panel.edges[k];
      if (s < 0 || s >= static_cast<int>(n) || e < 0 || e >= static_cast<int>(n)) {
        closed = false;
        break;
      }
      starts.insert(s);
      if (e != panel.edges[(k + 1) % n].first) {
        closed = false;
        break;
      }
    }
    if (!closed || starts.size() != n) {
      out.push_back({ViolationCode::NonClosedLoop, panel.id,
                     "edges do not form one closed loop over all vertices"});
      continue;
    }
    if (std::abs(panel.rotation.norm() - 1.0) > kQuatTolerance) {
      out.push_back({ViolationCode::BadQuaternion, panel.id, "quaternion norm outside 1e-6"});
    }
    // Simplicity: O(E^2) pairwise segment test; panels are small.
    bool simple = true;
    for (size_t i = 0; i + 1 < n && simple; ++i) {
      for (size_t j = i + 1; j < n && simple; ++j) {
        const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
        const Vec2& a = panel.vertices[panel.edges[i].first];
        const Vec2& b = panel.vertices[panel.edges[i].second];
        const Vec2& c = panel.vertices[panel.edges[j].first];
        const Vec2& d = panel.vertices[panel.edges[j].second];
        if (adjacent) {
          // Only a full overlap counts for adjacent edges; shared endpoint is fine.
          continue;
        }
        if (segments_properly_intersect(a, b, c, d)) simple = false;
      }
    }
    if (!simple) {
      out.push_back({ViolationCode::SelfIntersectingPanel, panel.id, "polygon self-intersects"});
    }
  }

  std::map<std::pair<std::string, int>, int> edge_use;  // edge -> stitch id
  std::set<int> stitch_ids;
  for (const auto& st : pattern.stitches) {
    stitch_ids.insert(st.id);
    const std::string where = "stitch " + std::to_string(st.id);
    for (const EdgeRef* ref : {&st.edge_a, &st.edge_b}) {
      const Panel* p = pattern.find_panel(ref->panel_id);
      if (!p || ref->edge_index < 0 ||
          ref->edge_index >= static_cast<int>(p->edges.size())) {
        out.push_back({ViolationCode::DanglingStitchRef, where,
                       ref->panel_id + "[" + std::to_string(ref->edge_index) + "]"});
      }
    }
    if (st.edge_a == st.edge_b) {
      out.push_back({ViolationCode::SelfStitch, where, "edge_a equals edge_b"});
    }
    for (const EdgeRef* ref : {&st.edge_a, &st.edge_b}) {
      auto key = std::make_pair(ref->panel_id, ref->edge_index);
      auto [it, inserted] = edge_use.emplace(key, st.id);
      if (!inserted && it->second != st.id) {
        out.push_back({ViolationCode::DuplicateEdgeUse, where,
                       ref->panel_id + "[" + std::to_string(ref->edge_index) +
                           "] also in stitch " + std::to_string(it->second)});
      }
    }
  }
  if (!pattern.stitches.empty()) {
    bool dense = stitch_ids.size() == pattern.stitches.size() &&
                 *stitch_ids.begin() == 0 &&
                 *stitch_ids.rbegin() == static_cast<int>(pattern.stitches.size()) - 1;
    if (!dense) {
      out.push_back({ViolationCode::NonDenseStitchIds, "stitches",
                     "ids must be dense and 0-based"});
    }
  }
  return out;
}

SewingPattern parse_pattern(const std::string& json_text) {
  return parse_pattern(json_text, nullptr);
}

SewingPattern parse_pattern(const std::string& json_text, std::vector<Violation>* out_violations) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedJson, e.what());
  }

  auto require = [](const nlohmann::json& j, const char* key) -> const nlohmann::json& {
    if (!j.is_object() || !j.contains(key)) {
      throw Error(Errc::SchemaViolation, std::string("missing field '") + key + "'");
    }
    return j.at(key);
  };

  SewingPattern pat;
  try {
    const std::string fmt = require(doc, "format").get<std::string>();
    if (fmt != "ggi-pattern/1") {
      throw Error(Errc::SchemaViolation, "unsupported format '" + fmt + "'");
    }
    pat.name = require(doc, "name").get<std::string>();
    for (const auto& jp : require(doc, "panels")) {
      Panel p;
      p.id = require(jp, "id").get<std::string>();
      p.panel_type = require(jp, "type").get<std::string>();
      for (const auto& jv : require(jp, "vertices")) {
        if (!jv.is_array() || jv.size() != 2) {
          throw Error(Errc::SchemaViolation, "vertex must be [x, y] in panel '" + p.id + "'");
        }
        p.vertices.push_back({jv[0].get<double>(), jv[1].get<double>()});
      }
      for (const auto& je : require(jp, "edges")) {
        if (!je.is_array() || je.size() != 2) {
          throw Error(Errc::SchemaViolation, "edge must be [i, j] in panel '" + p.id + "'");
        }
        p.edges.emplace_back(je[0].get<int>(), je[1].get<int>());
      }
      const auto& jq = require(jp, "rotation");
      if (!jq.is_array() || jq.size() != 4) {
        throw Error(Errc::SchemaViolation, "rotation must be [w, x, y, z] in panel '" + p.id + "'");
      }
      p.rotation = {jq[0].get<double>(), jq[1].get<double>(), jq[2].get<double>(),
                    jq[3].get<double>()};
      const auto& jt = require(jp, "translation");
      if (!jt.is_array() || jt.size() != 3) {
        throw Error(Errc::SchemaViolation, "translation must be [x, y, z] in panel '" + p.id + "'");
      }
      p.translation = {jt[0].get<double>(), jt[1].get<double>(), jt[2].get<double>()};
      pat.panels.push_back(std::move(p));
    }
    for (const auto& js : require(doc, "stitches")) {
      Stitch s;
      s.id = require(js, "id").get<int>();
      auto read_ref = [&](const char* key) {
        const auto& jr = require(js, key);
        if (!jr.is_array() || jr.size() != 2) {
          throw Error(Errc::SchemaViolation,
                      std::string("stitch ref '") + key + "' must be [panel_id, edge_idx]");
        }
        return EdgeRef{jr[0].get<std::string>(), jr[1].get<int>()};
      };
      s.edge_a = read_ref("a");
      s.edge_b = read_ref("b");
      pat.stitches.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaViolation, e.what());
  }

  auto violations = validate_pattern(pat);
  if (out_violations) {
    *out_violations = violations;
  } else if (!violations.empty()) {
    const auto& v = violations.front();
    throw Error(Errc::InvariantViolation,
                std::string(violation_code_name(v.code)) + " (" + v.detail + ") at " + v.where);
  }
  if (violations.empty()) {
    // Renormalize quaternions that passed the 1e-6 gate.
    for (auto& p : pat.panels) p.rotation = p.rotation.normalized();
  }
  return pat;
}

std::string serialize_pattern(const SewingPattern& pattern) {
  std::string out;
  out += "{\n";
  out += "  \"format\": \"ggi-pattern/1\",\n";
  out += "  \"name\": \"" + escape_json(pattern.name) + "\",\n";
  out += "  \"panels\": [";
  for (size_t i = 0; i < pattern.panels.size(); ++i) {
    const Panel& p = pattern.panels[i];
    out += (i == 0 ? "\n" : ",\n");
    out += "    {\"id\": \"" + escape_json(p.id) + "\", \"type\": \"" +
           escape_json(p.panel_type) + "\",\n";
    out += "     \"vertices\": [";
    for (size_t k = 0; k < p.vertices.size(); ++k) {
      if (k) out += ", ";
      out += "[" + fnum(p.vertices[k].x) + ", " + fnum(p.vertices[k].y) + "]";
    }
    out += "],\n     \"edges\": [";
    for (size_t k = 0; k < p.edges.size(); ++k) {
      if (k) out += ", ";
      out += "[" + std::to_string(p.edges[k].first) + ", " + std::to_string(p.edges[k].second) + "]";
    }
    out += "],\n     \"rotation\": [" + fnum(p.rotation.w) + ", " + fnum(p.rotation.x) + ", " +
           fnum(p.rotation.y) + ", " + fnum(p.rotation.z) + "],\n";
    out += "     \"translation\": [" + fnum(p.translation.x) + ", " + fnum(p.translation.y) +
           ", " + fnum(p.translation.z) + "]}";
  }
  out += pattern.panels.empty() ? "],\n" : "\n  ],\n";
  out += "  \"stitches\": [";
  for (size_t i = 0; i < pattern.stitches.size(); ++i) {
    const Stitch& s = pattern.stitches[i];
    out += (i == 0 ? "\n" : ",\n");
    out += "    {\"id\": " + std::to_string(s.id) + ", \"a\": [\"" +
           escape_json(s.edge_a.panel_id) + "\", " + std::to_string(s.edge_a.edge_index) +
           "], \"b\": [\"" + escape_json(s.edge_b.panel_id) + "\", " +
           std::to_string(s.edge_b.edge_index) + "]}";
  }
  out += pattern.stitches.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

}  // namespace ggi
