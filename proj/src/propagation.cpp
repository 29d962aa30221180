#include "pvx/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pvx/error.hpp"

namespace pvx {

int ProxyLayer::add_node(const Point2& p, int frame, int round) {
  const int node = node_count();
  positions.resize(positions.size() + static_cast<size_t>(n_local()) * 2, 0.0);
  confidence.resize(confidence.size() + n_local(), -1.0);
  round_tag.push_back(round);
  source_frame.push_back(frame);
  set_pos(node, frame, p);
  set_conf(node, frame, 1.0);
  return node;
}

std::vector<double> node_distance_field(const Mask& mask, const std::vector<Point2>& nodes) {
  const int h = mask.height, w = mask.width;
  std::vector<double> field(static_cast<size_t>(h) * w, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(y, x)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const Point2& p : nodes) {
        const double d2 = (p.x - x) * (p.x - x) + (p.y - y) * (p.y - y);
        if (d2 < best) best = d2;
      }
      field[static_cast<size_t>(y) * w + x] = std::sqrt(best);
    }
  }
  return field;
}

NonProxyResult find_non_proxy(const Mask& mask, const std::vector<Point2>& nodes, double eps_d) {
  if (eps_d <= 0) throw InvalidInput("find_non_proxy: eps_d must be positive");
  NonProxyResult out;
  out.distance = node_distance_field(mask, nodes);
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.test(y, x) && out.distance[static_cast<size_t>(y) * mask.width + x] >= eps_d)
        out.pixels.push_back({y, x});
  return out;
}

std::vector<Point2> supplement(const Mask& mask, const std::vector<Point2>& existing, double eps_d) {
  if (eps_d <= 0) throw InvalidInput("supplement: eps_d must be positive");
  const int h = mask.height, w = mask.width;
  std::vector<double> field = node_distance_field(mask, existing);
  std::vector<Point2> added;
  while (true) {
    double best = -1;
    int by = -1, bx = -1;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!mask.test(y, x)) continue;
        const double d = field[static_cast<size_t>(y) * w + x];
        if (d > best) {  // strict: ties keep the scanline-first pixel
          best = d;
          by = y;
          bx = x;
        }
      }
    }
    if (best < eps_d) break;
    const Point2 p{static_cast<double>(bx), static_cast<double>(by)};
    added.push_back(p);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!mask.test(y, x)) continue;
        const double d = std::hypot(p.x - x, p.y - y);
        double& f = field[static_cast<size_t>(y) * w + x];
        if (d < f) f = d;
      }
    }
  }
  return added;
}

std::optional<Point2> occlusion_fallback(const ProxyLayer& layer, int node, int frame,
                                         const PropagationConfig& config) {
  const int src = layer.source_frame[node];
  const Point2 anchor = layer.pos(node, src);
  struct Neighbor {
    double dist;
    int idx;
  };
  std::vector<Neighbor> covis;
  for (int m = 0; m < layer.node_count(); ++m) {
    if (m == node) continue;
    if (layer.conf(m, src) < config.conf_threshold) continue;
    if (layer.conf(m, frame) < config.conf_threshold) continue;
    const Point2 q = layer.pos(m, src);
    covis.push_back({std::hypot(q.x - anchor.x, q.y - anchor.y), m});
  }
  if (static_cast<int>(covis.size()) < config.k_nn) return std::nullopt;
  std::stable_sort(covis.begin(), covis.end(), [](const Neighbor& a, const Neighbor& b) { return a.dist < b.dist; });
  covis.resize(config.k_nn);
  double wsum = 0, dx = 0, dy = 0;
  for (const Neighbor& nb : covis) {
    const double wgt = 1.0 / std::max(nb.dist, 1e-6);
    const Point2 a = layer.pos(nb.idx, src);
    const Point2 b = layer.pos(nb.idx, frame);
    dx += wgt * (b.x - a.x);
    dy += wgt * (b.y - a.y);
    wsum += wgt;
  }
  return Point2{anchor.x + dx / wsum, anchor.y + dy / wsum};
}

namespace {

bool in_frame(const Point2& p, int h, int w) {
  return p.x >= -0.5 && p.y >= -0.5 && p.x <= w - 0.5 && p.y <= h - 0.5;
}

bool inside_mask(const Point2& p, const Mask& mask) {
  const int x = static_cast<int>(std::lround(p.x));
  const int y = static_cast<int>(std::lround(p.y));
  return mask.in_bounds(y, x) && mask.test(y, x);
}

// Advances the chained tracking of `nodes` from frame f to f+dir. Tracked
// positions are trusted only when the node is visible (inside its layer's
// mask) at f and the hop confidence clears the threshold; otherwise the
// neighbor-average fallback takes over, with the raw tracked position as a
// last resort.
void chain_hop(ProxyLayer& layer, const std::vector<int>& nodes, int f, int dir, const Tracker& tracker,
               const LayerMaskTrack& masks, const PropagationConfig& config, LayerDiagnostics* diag) {
  const int target = f + dir;
  const Mask& mask_f = masks.mask_at(f);
  const int h = mask_f.height, w = mask_f.width;

  TrackerQuery query;
  query.source_frame = f;
  query.target_frame = target;
  std::vector<int> queried;
  for (int node : nodes) {
    const Point2 p = layer.pos(node, f);
    if (in_frame(p, h, w)) {
      query.points.push_back(p);
      queried.push_back(node);
    }
  }
  TrackerResult res;
  if (!query.points.empty()) res = tracker.track(query);

  std::vector<char> accepted(layer.node_count(), 0);
  std::vector<Point2> raw(layer.node_count());
  std::vector<double> raw_conf(layer.node_count(), -1.0);
  for (size_t i = 0; i < queried.size(); ++i) {
    raw[queried[i]] = res.points[i];
    raw_conf[queried[i]] = res.confidence[i];
  }

  for (int node : nodes) {
    const Point2 p = layer.pos(node, f);
    const bool visible = in_frame(p, h, w) && inside_mask(p, mask_f);
    if (visible && raw_conf[node] >= config.conf_threshold) {
      layer.set_pos(node, target, raw[node]);
      layer.set_conf(node, target, raw_conf[node]);
      accepted[node] = 1;
    }
  }
  for (int node : nodes) {
    if (accepted[node]) continue;
    const Point2 p = layer.pos(node, f);
    const bool visible = in_frame(p, h, w) && inside_mask(p, mask_f);
    const double hop_conf = visible && raw_conf[node] >= 0 ? raw_conf[node] : 0.0;
    if (auto fb = occlusion_fallback(layer, node, target, config)) {
      layer.set_pos(node, target, *fb);
      layer.set_conf(node, target, hop_conf);
      if (diag) diag->fallback_count++;
    } else if (raw_conf[node] >= 0) {
      layer.set_pos(node, target, raw[node]);
      layer.set_conf(node, target, hop_conf);
      if (diag) diag->raw_fallback_count++;
    } else {
      layer.set_pos(node, target, p);  // out of frame: hold last position
      layer.set_conf(node, target, 0.0);
      if (diag) diag->raw_fallback_count++;
    }
  }
}

void chain_range(ProxyLayer& layer, const std::vector<int>& nodes, int from, int to, const Tracker& tracker,
                 const LayerMaskTrack& masks, const PropagationConfig& config, LayerDiagnostics* diag) {
  const int dir = to > from ? 1 : -1;
  for (int f = from; f != to; f += dir) chain_hop(layer, nodes, f, dir, tracker, masks, config, diag);
}

std::vector<Point2> positions_at(const ProxyLayer& layer, int frame) {
  std::vector<Point2> out(layer.node_count());
  for (int i = 0; i < layer.node_count(); ++i) out[i] = layer.pos(i, frame);
  return out;
}

}  // namespace

ProxyLayer propagate_seeds(const SeedNodes& seeds, const Tracker& tracker, const LayerMaskTrack& masks,
                           const PropagationConfig& config, LayerDiagnostics* diag) {
  if (seeds.frame != masks.t_start) throw InvalidInput("seeds must sit at the layer's first frame");
  ProxyLayer layer;
  layer.layer_id = masks.layer_id;
  layer.t_start = masks.t_start;
  layer.t_end = masks.t_end;

  const Mask& first = masks.mask_at(masks.t_start);
  std::vector<int> nodes;
  auto add_seed = [&](const Point2& p) {
    if (!inside_mask(p, first)) throw InvalidInput("seed outside layer mask");
    nodes.push_back(layer.add_node(p, masks.t_start, 0));
  };
  for (const Point2& p : seeds.edge_points) add_seed(p);
  for (const Point2& p : seeds.interior_points) add_seed(p);
  if (nodes.empty()) throw InvalidInput("empty layer");

  chain_range(layer, nodes, masks.t_start, masks.t_end, tracker, masks, config, diag);
  if (diag) diag->nodes_per_round.push_back(static_cast<int>(nodes.size()));
  return layer;
}

void propagate_bidirectional(ProxyLayer& layer, int first_node, int creation_frame, const Tracker& tracker,
                             const LayerMaskTrack& masks, const PropagationConfig& config,
                             LayerDiagnostics* diag) {
  std::vector<int> nodes;
  for (int i = first_node; i < layer.node_count(); ++i) nodes.push_back(i);
  if (nodes.empty()) return;
  if (creation_frame > layer.t_start)
    chain_range(layer, nodes, creation_frame, layer.t_start, tracker, masks, config, diag);
  if (creation_frame < layer.t_end)
    chain_range(layer, nodes, creation_frame, layer.t_end, tracker, masks, config, diag);
}

ProxyLayer build_layer(const SeedNodes& seeds, const Tracker& tracker, const LayerMaskTrack& masks,
                       const PropagationConfig& config, LayerDiagnostics* diag) {
  ProxyLayer layer = propagate_seeds(seeds, tracker, masks, config, diag);

  int next_round = 1;
  bool stopped = false;
  auto supplement_round = [&](int frame) {
    if (stopped) return;
    const std::vector<Point2> new_pts = supplement(masks.mask_at(frame), positions_at(layer, frame), config.eps_d);
    if (new_pts.empty()) return;
    size_t budget = new_pts.size();
    if (layer.node_count() + static_cast<int>(new_pts.size()) > config.max_nodes) {
      budget = std::max(0, config.max_nodes - layer.node_count());
      stopped = true;
      if (diag) diag->warnings.push_back("max_nodes reached; supplementation stopped early");
    }
    if (budget == 0) return;
    const int first = layer.node_count();
    for (size_t i = 0; i < budget; ++i) layer.add_node(new_pts[i], frame, next_round);
    propagate_bidirectional(layer, first, frame, tracker, masks, config, diag);
    if (diag) diag->nodes_per_round.push_back(static_cast<int>(budget));
    ++next_round;
  };

  if (config.schedule != PropagationConfig::Schedule::kFirstOnly && masks.t_end > masks.t_start) {
    supplement_round(masks.t_end);
    if (config.schedule == PropagationConfig::Schedule::kFull) {
      for (int t = masks.t_start + 1; t <= masks.t_end - 1 && !stopped; ++t) supplement_round(t);
    }
  }

  if (diag) {
    diag->per_frame_max_distance.assign(layer.n_local(), 0.0);
    for (int t = masks.t_start; t <= masks.t_end; ++t) {
      const std::vector<double> field = node_distance_field(masks.mask_at(t), positions_at(layer, t));
      double mx = 0;
      for (double d : field) mx = std::max(mx, d);
      diag->per_frame_max_distance[t - masks.t_start] = mx;
      if (stopped && mx >= config.eps_d) diag->uncovered_frames.push_back(t);
    }
  }
  return layer;
}

}  // namespace pvx
