#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ggi/raster.hpp"
#include "ggi/remesh.hpp"

namespace ggi {

enum class ChainSide { kA, kB };

/// Ordered boundary pixels of one side of a stitch, with the matching
/// mesh vertex per pixel.
struct BoundaryChain {
  int stitch_id = 0;
  ChainSide side = ChainSide::kA;
  std::string panel_id;
  std::vector<std::pair<int, int>> pixels;  // 8-connected, simple
  std::vector<int> vertex_indices;
};

/// Monotone DTW path between the two chains of one stitch.
struct StitchCorrespondence {
  int stitch_id = 0;
  std::vector<std::pair<int, int>> pairs;  // (index_a, index_b); with
                                           // reversed_b, index_b counts
                                           // from the end of chain_b
  double cost = 0.0;                       // cm
  bool reversed_b = false;
};

enum class DtwCostSpace { k3d, kUv };

/// Groups stitch-colored pixels by id and traces each of the two
/// 8-connected components from an endpoint. Pixels without a mesh vertex
/// are skipped. Throws ChainCountMismatch, BrokenChain; closed rings are
/// cut at their lexicographically smallest pixel.
std::vector<BoundaryChain> extract_chains(const GgiRaster& raster, const IndexedMesh& mesh);

/// Standard DTW over pairwise vertex distances; chain_b is tried forward
/// and reversed, keeping the cheaper alignment.
StitchCorrespondence dtw_align(const BoundaryChain& chain_a, const BoundaryChain& chain_b,
                               const IndexedMesh& mesh,
                               DtwCostSpace cost_space = DtwCostSpace::k3d);

/// Union-find weld: every corresponded pair is merged, each class is
/// replaced by one vertex at the member mean, faces are reindexed and
/// degenerate ones removed, unreferenced vertices compacted out.
/// vertex_map, when given, receives old index -> welded index (-1 if the
/// vertex was dropped as unreferenced).
IndexedMesh weld(const IndexedMesh& mesh, const std::vector<StitchCorrespondence>& correspondences,
                 const std::vector<BoundaryChain>& chains, std::vector<int>* vertex_map = nullptr);

struct SeamReportEntry {
  int stitch_id = 0;
  size_t chain_length_a = 0;
  size_t chain_length_b = 0;
  double dtw_cost_cm = 0.0;
  double max_pre_weld_gap_cm = 0.0;
};

struct AssembleResult {
  IndexedMesh mesh;
  std::vector<SeamReportEntry> seams;
};

/// Full decode: remesh, chain extraction, per-stitch DTW, weld.
AssembleResult assemble(const GgiRaster& raster, DtwCostSpace cost_space = DtwCostSpace::k3d);

std::string seam_report_json(const std::vector<SeamReportEntry>& seams);

}  // namespace ggi
