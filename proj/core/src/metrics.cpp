#include "ggi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "ggi/error.hpp"
#include "ggi/palette.hpp"

namespace ggi {

namespace {

/// Balanced kd-tree over 3D points for nearest-neighbor queries.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points) : pts_(points) {
    order_.resize(pts_.size());
    std::iota(order_.begin(), order_.end(), 0);
    build(0, order_.size(), 0);
  }

  double nearest_dist2(const Vec3& q) const {
    double best = std::numeric_limits<double>::max();
    query(0, order_.size(), 0, q, &best);
    return best;
  }

 private:
  void build(size_t lo, size_t hi, int axis) {
    if (hi - lo <= 1) return;
    const size_t mid = (lo + hi) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                     [&](size_t a, size_t b) { return coord(pts_[a], axis) < coord(pts_[b], axis); });
    build(lo, mid, (axis + 1) % 3);
    build(mid + 1, hi, (axis + 1) % 3);
  }

  void query(size_t lo, size_t hi, int axis, const Vec3& q, double* best) const {
    if (lo >= hi) return;
    const size_t mid = (lo + hi) / 2;
    const Vec3& p = pts_[order_[mid]];
    *best = std::min(*best, dist2(p, q));
    const double delta = coord(q, axis) - coord(p, axis);
    const int next = (axis + 1) % 3;
    if (delta < 0) {
      query(lo, mid, next, q, best);
      if (delta * delta < *best) query(mid + 1, hi, next, q, best);
    } else {
      query(mid + 1, hi, next, q, best);
      if (delta * delta < *best) query(lo, mid, next, q, best);
    }
  }

  static double coord(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }

  const std::vector<Vec3>& pts_;
  std::vector<size_t> order_;
};

double mean_nearest(const std::vector<Vec3>& from, const KdTree& to) {
  double sum = 0.0;
  for (const auto& p : from) sum += std::sqrt(to.nearest_dist2(p));
  return sum / from.size();
}

}  // namespace

std::vector<uint8_t> edge_band_mask(const GgiRaster& raster, int w) {
  const int side = raster.side;
  std::vector<uint8_t> contour(static_cast<size_t>(side) * side, 0);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (!raster.is_valid(x, y)) continue;
      bool edge = false;
      for (int dy = -1; dy <= 1 && !edge; ++dy) {
        for (int dx = -1; dx <= 1 && !edge; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= side || ny >= side || !raster.is_valid(nx, ny)) {
            edge = true;
          }
        }
      }
      if (edge) contour[raster.idx(x, y)] = 1;
    }
  }
  // Chebyshev dilation by w, then clip to the valid mask.
  std::vector<uint8_t> band(static_cast<size_t>(side) * side, 0);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (!contour[raster.idx(x, y)]) continue;
      for (int dy = -w; dy <= w; ++dy) {
        for (int dx = -w; dx <= w; ++dx) {
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= side || ny >= side) continue;
          if (raster.valid[raster.idx(nx, ny)]) band[raster.idx(nx, ny)] = 1;
        }
      }
    }
  }
  return band;
}

double edge_aware_l1(const GgiRaster& gt, const GgiRaster& pred, double alpha, int w) {
  if (gt.side != pred.side) throw Error(Errc::ShapeMismatch, "raster sides differ");
  if (!(gt.norm == pred.norm)) throw Error(Errc::NormMismatch, "normalization differs");

  const auto band = edge_band_mask(gt, w);
  double interior_sum = 0.0, band_sum = 0.0;
  size_t interior_n = 0, band_n = 0;
  const size_t npx = static_cast<size_t>(gt.side) * gt.side;
  for (size_t i = 0; i < npx; ++i) {
    if (!gt.valid[i]) continue;
    double l1 = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double pv = pred.valid[i] ? pred.geometry[i * 3 + c] : 0.0;
      l1 += std::abs(gt.geometry[i * 3 + c] - pv);
    }
    interior_sum += l1;
    interior_n += 3;
    if (band[i]) {
      band_sum += l1;
      band_n += 3;
    }
  }
  const double interior = interior_n ? interior_sum / interior_n : 0.0;
  const double edge = band_n ? band_sum / band_n : 0.0;
  return interior + alpha * edge;
}

double stitch_chamfer(const GgiRaster& pred) {
  using Pixel = std::pair<int, int>;
  std::map<int, std::set<Pixel>> pixels_by_stitch;
  for (int y = 0; y < pred.side; ++y) {
    for (int x = 0; x < pred.side; ++x) {
      const Rgb8 c = pred.stitching_at(x, y);
      if (c == kBackground) continue;
      const auto id = stitch_id_of_color(c);
      if (!id) throw Error(Errc::FormatVersionMismatch, "unresolvable stitch color");
      pixels_by_stitch[*id].insert({x, y});
    }
  }
  if (pixels_by_stitch.empty()) {
    throw Error(Errc::EmptySet, "stitching raster identifies no stitches");
  }

  double total = 0.0;
  for (const auto& [id, pixels] : pixels_by_stitch) {
    // Two 8-connected components = the two edges of the stitch.
    std::vector<std::vector<Pixel>> comps;
    std::set<Pixel> left = pixels;
    while (!left.empty()) {
      std::vector<Pixel> comp{*left.begin()};
      left.erase(left.begin());
      for (size_t k = 0; k < comp.size(); ++k) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            auto it = left.find({comp[k].first + dx, comp[k].second + dy});
            if (it != left.end()) {
              comp.push_back(*it);
              left.erase(it);
            }
          }
        }
      }
      comps.push_back(std::move(comp));
    }
    if (comps.size() != 2) {
      throw Error(Errc::ChainCountMismatch,
                  "stitch " + std::to_string(id) + " has " + std::to_string(comps.size()) +
                      " chains, expected 2");
    }
    auto points = [&](const std::vector<Pixel>& comp) {
      std::vector<Vec3> out;
      for (const auto& [x, y] : comp) {
        if (pred.is_valid(x, y)) out.push_back(pred.world_at(x, y));
      }
      return out;
    };
    const auto pa = points(comps[0]);
    const auto pb = points(comps[1]);
    if (pa.empty() || pb.empty()) {
      throw Error(Errc::EmptySet, "stitch " + std::to_string(id) + ": edge has no valid pixels");
    }
    total += chamfer_distance(pa, pb);
  }
  return total / pixels_by_stitch.size();
}

double chamfer_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw Error(Errc::EmptySet, "chamfer over empty point set");
  const KdTree ta(a);
  const KdTree tb(b);
  return mean_nearest(a, tb) + mean_nearest(b, ta);
}

std::vector<Vec3> sample_surface(const IndexedMesh& mesh, size_t n, uint64_t seed) {
  std::vector<double> cum;
  std::vector<size_t> face_of;
  double total = 0.0;
  for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& f = mesh.faces[fi];
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
    const Vec3& p0 = mesh.vertices[f[0]];
    const double area =
        (mesh.vertices[f[1]] - p0).cross(mesh.vertices[f[2]] - p0).norm() * 0.5;
    if (area <= 0.0) continue;
    total += area;
    cum.push_back(total);
    face_of.push_back(fi);
  }
  if (cum.empty()) throw Error(Errc::EmptyMesh, "mesh has no non-degenerate faces");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const double r = uni(rng) * total;
    const size_t idx = std::lower_bound(cum.begin(), cum.end(), r) - cum.begin();
    const auto& f = mesh.faces[face_of[std::min(idx, face_of.size() - 1)]];
    double u = uni(rng), v = uni(rng);
    const double su = std::sqrt(u);
    const double w0 = 1.0 - su, w1 = su * (1.0 - v), w2 = su * v;
    out.push_back(mesh.vertices[f[0]] * w0 + mesh.vertices[f[1]] * w1 +
                  mesh.vertices[f[2]] * w2);
  }
  return out;
}

}  // namespace ggi
