#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pvx/geometry.hpp"
#include "pvx/image.hpp"
#include "pvx/tracking.hpp"
#include "pvx/vectorizer.hpp"

namespace pvx {

// Complete per-layer node trajectories. Storage is node-major over the
// layer's local frame range [t_start, t_end].
struct ProxyLayer {
  int layer_id = 0;
  int t_start = 0;
  int t_end = 0;
  std::vector<double> positions;   // g * n_local * 2
  std::vector<double> confidence;  // g * n_local; entries < 0 are not yet set
  std::vector<int> round_tag;      // per node
  std::vector<int> source_frame;   // per node

  int node_count() const { return static_cast<int>(round_tag.size()); }
  int n_local() const { return t_end - t_start + 1; }

  Point2 pos(int node, int frame) const {
    const size_t base = (static_cast<size_t>(node) * n_local() + (frame - t_start)) * 2;
    return {positions[base], positions[base + 1]};
  }
  void set_pos(int node, int frame, const Point2& p) {
    const size_t base = (static_cast<size_t>(node) * n_local() + (frame - t_start)) * 2;
    positions[base] = p.x;
    positions[base + 1] = p.y;
  }
  double conf(int node, int frame) const {
    return confidence[static_cast<size_t>(node) * n_local() + (frame - t_start)];
  }
  void set_conf(int node, int frame, double c) {
    confidence[static_cast<size_t>(node) * n_local() + (frame - t_start)] = c;
  }
  // Appends a node anchored at `frame`; returns its index.
  int add_node(const Point2& p, int frame, int round);
};

struct PropagationConfig {
  enum class Schedule { kFull, kFirstOnly, kFirstLast };
  double eps_d = 30.0;          // px, non-proxy threshold
  double conf_threshold = 0.2;  // below this a tracked position is unreliable
  int k_nn = 8;                 // neighbors for the occlusion fallback
  int max_nodes = 20000;        // per layer safety valve
  Schedule schedule = Schedule::kFull;
};

struct LayerDiagnostics {
  std::vector<int> nodes_per_round;
  std::vector<double> per_frame_max_distance;  // index = frame - t_start
  long fallback_count = 0;
  long raw_fallback_count = 0;
  std::vector<int> uncovered_frames;
  std::vector<std::string> warnings;
};

// Exact per-pixel Euclidean distance to the nearest node position, for mask
// pixels (0 elsewhere).
std::vector<double> node_distance_field(const Mask& mask, const std::vector<Point2>& nodes);

struct NonProxyResult {
  std::vector<double> distance;           // row-major, mask pixels only
  std::vector<std::pair<int, int>> pixels;  // (y, x) with d >= eps_d, scanline order
};
NonProxyResult find_non_proxy(const Mask& mask, const std::vector<Point2>& nodes, double eps_d);

// Greedy farthest-point insertion until no in-mask pixel is >= eps_d from a
// node. New nodes sit on pixel centers; ties break in scanline order.
std::vector<Point2> supplement(const Mask& mask, const std::vector<Point2>& existing, double eps_d);

// Neighbor-weighted displacement estimate for an unreliable tracked
// position: anchor at the node's source frame plus the inverse-distance
// weighted mean displacement of its k nearest co-visible neighbors.
// Returns nullopt when fewer than k_nn co-visible neighbors exist.
std::optional<Point2> occlusion_fallback(const ProxyLayer& layer, int node, int frame,
                                         const PropagationConfig& config);

// Round-0 trajectories: chained tracking of the seed nodes from the layer's
// first frame to its last.
ProxyLayer propagate_seeds(const SeedNodes& seeds, const Tracker& tracker, const LayerMaskTrack& masks,
                           const PropagationConfig& config, LayerDiagnostics* diag = nullptr);

// Chains nodes [first_node, g) of `layer` from their creation frame backward
// to t_start and forward to t_end.
void propagate_bidirectional(ProxyLayer& layer, int first_node, int creation_frame, const Tracker& tracker,
                             const LayerMaskTrack& masks, const PropagationConfig& config,
                             LayerDiagnostics* diag = nullptr);

// Full schedule: round-0 propagation, supplementation at the last frame with
// backward propagation, then per-frame supplementation sweeps with
// bidirectional propagation, with the occlusion fallback applied to every
// low-confidence hop.
ProxyLayer build_layer(const SeedNodes& seeds, const Tracker& tracker, const LayerMaskTrack& masks,
                       const PropagationConfig& config, LayerDiagnostics* diag = nullptr);

}  // namespace pvx
