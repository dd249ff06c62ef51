#pragma once

#include <cstdint>
#include <vector>

#include "ggi/raster.hpp"
#include "ggi/remesh.hpp"
#include "ggi/vec.hpp"

namespace ggi {

// Loss weights used for the combined score; the normal term itself is
// out of scope here.
inline constexpr double kLambdaReg = 1.0;
inline constexpr double kLambdaStitch = 1000.0;
inline constexpr double kLambdaNorm = 0.01;
inline constexpr double kDefaultEdgeAlpha = 100.0;
inline constexpr int kDefaultEdgeBandWidth = 10;

/// Pixels within Chebyshev distance w of the panel contour (valid pixels
/// bordering invalid ones), intersected with the valid mask.
std::vector<uint8_t> edge_band_mask(const GgiRaster& raster, int w);

/// Per-pixel-mean L1 over valid pixels plus alpha times the mean over the
/// edge proximity band. Both rasters must share shape and normalization.
double edge_aware_l1(const GgiRaster& gt, const GgiRaster& pred,
                     double alpha = kDefaultEdgeAlpha, int w = kDefaultEdgeBandWidth);

/// Mean over stitches of the symmetric Chamfer distance between the two
/// edges' predicted boundary point sets (world cm).
double stitch_chamfer(const GgiRaster& pred);

/// Symmetric sum convention: mean_a min_b ||.|| + mean_b min_a ||.||.
double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// Area-weighted uniform surface samples; deterministic per seed.
std::vector<Vec3> sample_surface(const IndexedMesh& mesh, size_t n, uint64_t seed);

}  // namespace ggi
