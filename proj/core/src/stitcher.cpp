#include "ggi/stitcher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "ggi/error.hpp"
#include "ggi/palette.hpp"

namespace ggi {

namespace {

using Pixel = std::pair<int, int>;

const int kNeighborDx[8] = {0, 0, -1, 1, -1, 1, -1, 1};
const int kNeighborDy[8] = {-1, 1, 0, 0, -1, -1, 1, 1};

/// Boundary cycles of the remeshed patches, walked along directed
/// boundary edges (faces are consistently counter-clockwise in UV, so
/// each boundary edge has a unique direction).
struct BoundaryCycles {
  std::vector<std::vector<int>> cycles;                    // vertex loops
  std::map<int, std::pair<int, int>> where;                // vertex -> (cycle, position)
};

BoundaryCycles boundary_cycles(const IndexedMesh& mesh,
                               const std::map<std::pair<int, int>, int>& edge_faces) {
  std::map<int, std::vector<int>> out_nbr;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      auto key = std::minmax(a, b);
      if (edge_faces.at({key.first, key.second}) == 1) out_nbr[a].push_back(b);
    }
  }
  auto pixel_of = [&](int v) {
    const auto& [x, y] = mesh.uv_of_vertex[v];
    return std::make_pair(y, x);
  };

  BoundaryCycles out;
  std::set<std::pair<int, int>> used;
  for (const auto& [start, nbrs] : out_nbr) {
    for (int first : nbrs) {
      if (used.count({start, first})) continue;
      std::vector<int> cycle{start};
      used.insert({start, first});
      int cur = first;
      while (cur != start) {
        cycle.push_back(cur);
        int next = -1;
        for (int w : out_nbr[cur]) {
          if (used.count({cur, w})) continue;
          if (next < 0 || pixel_of(w) < pixel_of(next)) next = w;
        }
        if (next < 0) throw Error(Errc::BrokenChain, "open boundary walk");
        used.insert({cur, next});
        cur = next;
      }
      const int ci = static_cast<int>(out.cycles.size());
      for (size_t p = 0; p < cycle.size(); ++p) {
        out.where.emplace(cycle[p], std::make_pair(ci, static_cast<int>(p)));
      }
      out.cycles.push_back(std::move(cycle));
    }
  }
  return out;
}

/// Orders one band as the arc of its boundary cycle spanning the band's
/// vertices. Non-band vertices inside the arc (corner pixels the band
/// color missed) are kept: skipping them would make chain edges interior
/// to the mesh and the weld non-manifold there.
std::vector<int> trace_band(const std::vector<int>& band_vertices, const BoundaryCycles& bc,
                            int stitch_id) {
  auto fail = [&](const std::string& why) {
    return Error(Errc::BrokenChain, "stitch " + std::to_string(stitch_id) + ": " + why);
  };
  int ci = -1;
  std::vector<int> positions;
  for (int v : band_vertices) {
    auto it = bc.where.find(v);
    if (it == bc.where.end()) throw fail("band vertex off every boundary cycle");
    if (ci < 0) ci = it->second.first;
    if (it->second.first != ci) throw fail("band spans two boundary cycles");
    positions.push_back(it->second.second);
  }
  const auto& cycle = bc.cycles[ci];
  const int L = static_cast<int>(cycle.size());
  std::sort(positions.begin(), positions.end());

  // The band arc is the cycle minus the largest band-free gap.
  int gap_at = 0, gap_len = -1;
  const int n = static_cast<int>(positions.size());
  for (int k = 0; k < n; ++k) {
    const int next = positions[(k + 1) % n] + (k + 1 == n ? L : 0);
    if (next - positions[k] > gap_len) {
      gap_len = next - positions[k];
      gap_at = k;
    }
  }
  const int first = positions[(gap_at + 1) % n];
  const int last = positions[gap_at];
  const int span = (last - first + L) % L;

  constexpr int kMaxInternalGap = 3;
  std::vector<int> chain;
  chain.reserve(span + 1);
  std::set<int> pos_set(positions.begin(), positions.end());
  int run = 0;
  for (int s = 0; s <= span; ++s) {
    const int p = (first + s) % L;
    if (pos_set.count(p)) {
      run = 0;
    } else if (++run > kMaxInternalGap) {
      throw fail("band is not contiguous along the boundary");
    }
    chain.push_back(cycle[p]);
  }
  return chain;
}

std::string fnum(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

}  // namespace

std::vector<BoundaryChain> extract_chains(const GgiRaster& raster, const IndexedMesh& mesh) {
  std::map<Pixel, int> vertex_at;
  for (size_t vi = 0; vi < mesh.uv_of_vertex.size(); ++vi) {
    vertex_at[mesh.uv_of_vertex[vi]] = static_cast<int>(vi);
  }

  // Chains must run along the mesh boundary: welding an interior vertex
  // (as happens at staircase corners of slanted seams, where the band
  // pixel's every edge already carries two faces) would make the seam
  // edges non-manifold.
  std::map<std::pair<int, int>, int> edge_faces;
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k], b = f[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_faces[{a, b}];
    }
  }
  std::vector<uint8_t> on_boundary(mesh.vertices.size(), 0);
  for (const auto& [e, cnt] : edge_faces) {
    if (cnt == 1) on_boundary[e.first] = on_boundary[e.second] = 1;
  }
  const BoundaryCycles bc = boundary_cycles(mesh, edge_faces);

  std::map<int, std::set<Pixel>> pixels_by_stitch;
  for (int y = 0; y < raster.side; ++y) {
    for (int x = 0; x < raster.side; ++x) {
      const Rgb8 c = raster.stitching_at(x, y);
      if (c == kBackground) continue;
      const auto id = stitch_id_of_color(c);
      if (!id) {
        throw Error(Errc::FormatVersionMismatch,
                    "stitching color does not resolve to a stitch id");
      }
      pixels_by_stitch[*id].insert({x, y});
    }
  }

  std::vector<BoundaryChain> chains;
  for (const auto& [stitch_id, pixels] : pixels_by_stitch) {
    // 8-connected components.
    std::vector<std::set<Pixel>> comps;
    std::set<Pixel> left = pixels;
    while (!left.empty()) {
      std::set<Pixel> comp;
      std::vector<Pixel> stack{*left.begin()};
      left.erase(left.begin());
      while (!stack.empty()) {
        Pixel p = stack.back();
        stack.pop_back();
        comp.insert(p);
        for (int k = 0; k < 8; ++k) {
          Pixel q{p.first + kNeighborDx[k], p.second + kNeighborDy[k]};
          auto it = left.find(q);
          if (it != left.end()) {
            left.erase(it);
            stack.push_back(q);
          }
        }
      }
      comps.push_back(std::move(comp));
    }
    if (comps.size() != 2) {
      throw Error(Errc::ChainCountMismatch,
                  "stitch " + std::to_string(stitch_id) + " has " +
                      std::to_string(comps.size()) + " chains, expected 2");
    }

    std::vector<BoundaryChain> pair;
    for (const auto& comp : comps) {
      std::vector<int> band_vertices;
      for (const auto& px : comp) {
        auto it = vertex_at.find(px);
        if (it == vertex_at.end()) continue;  // band pixel without a mesh vertex
        if (!on_boundary[it->second]) continue;
        band_vertices.push_back(it->second);
      }
      if (band_vertices.empty()) {
        throw Error(Errc::BrokenChain, "stitch " + std::to_string(stitch_id) +
                                           ": chain has no mesh vertices");
      }
      BoundaryChain chain;
      chain.stitch_id = stitch_id;
      for (int v : trace_band(band_vertices, bc, stitch_id)) {
        chain.pixels.push_back(mesh.uv_of_vertex[v]);
        chain.vertex_indices.push_back(v);
      }
      chain.panel_id = mesh.panel_of_vertex[chain.vertex_indices.front()];
      pair.push_back(std::move(chain));
    }
    // Side A/B by (panel_id, first pixel) for determinism.
    auto key = [](const BoundaryChain& c) {
      return std::make_tuple(c.panel_id, c.pixels.front().second, c.pixels.front().first);
    };
    if (key(pair[1]) < key(pair[0])) std::swap(pair[0], pair[1]);
    pair[0].side = ChainSide::kA;
    pair[1].side = ChainSide::kB;
    chains.push_back(std::move(pair[0]));
    chains.push_back(std::move(pair[1]));
  }
  return chains;
}

namespace {

struct DtwResult {
  std::vector<std::pair<int, int>> path;
  double cost = 0.0;
};

DtwResult dtw_core(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<double> dp(n * m);
  auto D = [&](size_t i, size_t j) -> double& { return dp[i * m + j]; };
  auto c = [&](size_t i, size_t j) { return dist(a[i], b[j]); };

  D(0, 0) = c(0, 0);
  for (size_t i = 1; i < n; ++i) D(i, 0) = c(i, 0) + D(i - 1, 0);
  for (size_t j = 1; j < m; ++j) D(0, j) = c(0, j) + D(0, j - 1);
  for (size_t i = 1; i < n; ++i) {
    for (size_t j = 1; j < m; ++j) {
      D(i, j) = c(i, j) + std::min({D(i - 1, j - 1), D(i - 1, j), D(i, j - 1)});
    }
  }

  DtwResult res;
  res.cost = D(n - 1, m - 1);
  size_t i = n - 1, j = m - 1;
  res.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      // Tie preference: diagonal, then up, then left.
      const double dd = D(i - 1, j - 1), du = D(i - 1, j), dl = D(i, j - 1);
      if (dd <= du && dd <= dl) {
        --i;
        --j;
      } else if (du <= dl) {
        --i;
      } else {
        --j;
      }
    }
    res.path.emplace_back(i, j);
  }
  std::reverse(res.path.begin(), res.path.end());
  return res;
}

}  // namespace

StitchCorrespondence dtw_align(const BoundaryChain& chain_a, const BoundaryChain& chain_b,
                               const IndexedMesh& mesh, DtwCostSpace cost_space) {
  auto positions = [&](const BoundaryChain& c) {
    std::vector<Vec3> out;
    out.reserve(c.vertex_indices.size());
    for (size_t k = 0; k < c.vertex_indices.size(); ++k) {
      if (cost_space == DtwCostSpace::k3d) {
        out.push_back(mesh.vertices[c.vertex_indices[k]]);
      } else {
        out.push_back({static_cast<double>(c.pixels[k].first),
                       static_cast<double>(c.pixels[k].second), 0.0});
      }
    }
    return out;
  };
  const auto pa = positions(chain_a);
  auto pb = positions(chain_b);

  const DtwResult forward = dtw_core(pa, pb);
  std::reverse(pb.begin(), pb.end());
  const DtwResult backward = dtw_core(pa, pb);

  StitchCorrespondence corr;
  corr.stitch_id = chain_a.stitch_id;
  if (backward.cost < forward.cost) {
    corr.reversed_b = true;
    corr.pairs = backward.path;
    corr.cost = backward.cost;
  } else {
    corr.pairs = forward.path;
    corr.cost = forward.cost;
  }
  return corr;
}

IndexedMesh weld(const IndexedMesh& mesh, const std::vector<StitchCorrespondence>& correspondences,
                 const std::vector<BoundaryChain>& chains, std::vector<int>* vertex_map) {
  const size_t n = mesh.vertices.size();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smallest index as root
    parent[b] = a;
  };

  for (const auto& corr : correspondences) {
    const BoundaryChain* ca = nullptr;
    const BoundaryChain* cb = nullptr;
    for (const auto& ch : chains) {
      if (ch.stitch_id != corr.stitch_id) continue;
      (ch.side == ChainSide::kA ? ca : cb) = &ch;
    }
    if (!ca || !cb) {
      throw Error(Errc::BadParams,
                  "no chains for stitch " + std::to_string(corr.stitch_id));
    }
    const size_t lb = cb->vertex_indices.size();
    for (const auto& [ia, ib] : corr.pairs) {
      const size_t jb = corr.reversed_b ? lb - 1 - ib : static_cast<size_t>(ib);
      unite(ca->vertex_indices[ia], cb->vertex_indices[jb]);
    }
  }

  // Class means at the representative (smallest member index).
  std::vector<Vec3> sum(n);
  std::vector<int> count(n, 0);
  for (size_t v = 0; v < n; ++v) {
    const int r = find(static_cast<int>(v));
    sum[r] = sum[r] + mesh.vertices[v];
    ++count[r];
  }

  std::vector<std::array<int, 3>> new_faces;
  new_faces.reserve(mesh.faces.size());
  std::vector<uint8_t> referenced(n, 0);
  for (const auto& f : mesh.faces) {
    const std::array<int, 3> g{find(f[0]), find(f[1]), find(f[2])};
    if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;  // degenerate after merge
    new_faces.push_back(g);
    for (int v : g) referenced[v] = 1;
  }

  IndexedMesh out;
  std::vector<int> remap(n, -1);
  for (size_t v = 0; v < n; ++v) {
    if (find(static_cast<int>(v)) != static_cast<int>(v) || !referenced[v]) continue;
    remap[v] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(sum[v] / count[v]);
    out.uv_of_vertex.push_back(mesh.uv_of_vertex[v]);
    out.panel_of_vertex.push_back(mesh.panel_of_vertex[v]);
  }
  for (auto& f : new_faces) {
    out.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
  }
  if (vertex_map) {
    vertex_map->assign(n, -1);
    for (size_t v = 0; v < n; ++v) (*vertex_map)[v] = remap[find(static_cast<int>(v))];
  }
  return out;
}

AssembleResult assemble(const GgiRaster& raster, DtwCostSpace cost_space) {
  AssembleResult result;
  IndexedMesh panels = remesh(raster);
  const auto chains = extract_chains(raster, panels);

  std::vector<StitchCorrespondence> correspondences;
  for (size_t i = 0; i + 1 < chains.size(); i += 2) {
    const auto& a = chains[i];
    const auto& b = chains[i + 1];
    auto corr = dtw_align(a, b, panels, cost_space);

    SeamReportEntry entry;
    entry.stitch_id = a.stitch_id;
    entry.chain_length_a = a.vertex_indices.size();
    entry.chain_length_b = b.vertex_indices.size();
    entry.dtw_cost_cm = corr.cost;
    for (const auto& [ia, ib] : corr.pairs) {
      const size_t jb = corr.reversed_b ? b.vertex_indices.size() - 1 - ib
                                        : static_cast<size_t>(ib);
      entry.max_pre_weld_gap_cm =
          std::max(entry.max_pre_weld_gap_cm,
                   dist(panels.vertices[a.vertex_indices[ia]],
                        panels.vertices[b.vertex_indices[jb]]));
    }
    result.seams.push_back(entry);
    correspondences.push_back(std::move(corr));
  }

  result.mesh = weld(panels, correspondences, chains);
  return result;
}

std::string seam_report_json(const std::vector<SeamReportEntry>& seams) {
  std::string out;
  for (const auto& s : seams) {
    out += "{\"id\": " + std::to_string(s.stitch_id) + ", \"chain_lengths\": [" +
           std::to_string(s.chain_length_a) + ", " + std::to_string(s.chain_length_b) +
           "], \"dtw_cost_cm\": " + fnum(s.dtw_cost_cm) +
           ", \"max_pre_weld_gap_cm\": " + fnum(s.max_pre_weld_gap_cm) + "}\n";
  }
  return out;
}

}  // namespace ggi
