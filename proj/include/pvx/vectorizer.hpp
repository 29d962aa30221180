#pragma once

#include <vector>

#include "pvx/geometry.hpp"
#include "pvx/image.hpp"

namespace pvx {

// One semantic layer's mask track. Layer 0 is the background; its mask is
// the per-frame complement of the union of foreground masks.
struct LayerMaskTrack {
  int layer_id = 0;
  int t_start = 0;
  int t_end = 0;  // inclusive
  std::vector<Mask> masks;  // one per frame in [t_start, t_end]

  const Mask& mask_at(int frame) const { return masks.at(frame - t_start); }
  bool alive_at(int frame) const { return frame >= t_start && frame <= t_end; }
};

struct SeedNodes {
  std::vector<Point2> edge_points;
  std::vector<Point2> interior_points;
  int frame = 0;
};

struct VectorizerConfig {
  double simplify_tol = 2.0;    // px, polyline simplification
  double min_area = 16.0;       // px^2, components below this are dropped
  double spacing = 15.0;        // px, min pairwise distance of interior seeds
  int max_seed_nodes = 2000;    // per layer
  int max_interior = 2000;
};

// A closed contour; closure is implicit (last point connects to first).
using Polyline = std::vector<Point2>;

// Moore-neighbor tracing over every 8-connected component with area >=
// min_area. Outer boundaries come out with positive shoelace area in pixel
// coordinates, hole boundaries negative.
std::vector<Polyline> trace_contours(const Mask& mask, double min_area = 16.0);

// Douglas-Peucker on an open polyline. Endpoints are always kept.
std::vector<Point2> simplify_open(const std::vector<Point2>& poly, double tol);

// Closed-polyline simplification: anchors at the first vertex and the vertex
// farthest from it, then runs Douglas-Peucker on both halves.
std::vector<Point2> simplify_polyline(const Polyline& poly, double tol);

// Magnitude of the 3x3 Sobel response on the (unmasked) image, with edge
// replication at the raster border; zeroed outside the mask.
ImageGray sobel_gradient(const ImageGray& image, const Mask& mask);

// Greedy selection of up to n_max mask pixels in descending gradient order,
// skipping pixels within `spacing` of an already-chosen point or of any
// point in `blocked`. Ties break in scanline order.
std::vector<Point2> sample_interior(const ImageGray& grad, const Mask& mask, double spacing, int n_max,
                                    const std::vector<Point2>& blocked = {});

SeedNodes vectorize_layer(const ImageRgb& frame_image, const Mask& mask, int frame,
                          const VectorizerConfig& config);

}  // namespace pvx
