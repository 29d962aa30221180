#include "pvx/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <unordered_map>

#include "pvx/error.hpp"

namespace pvx {

namespace {

double shoelace(const Polyline& poly) {
  double a = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Point2& p = poly[i];
    const Point2& q = poly[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return 0.5 * a;
}

// Moore neighborhood in clockwise order starting east.
constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

int dir_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i)
    if (kDx[i] == dx && kDy[i] == dy) return i;
  return 0;
}

// Moore-neighbor tracing with Jacob's stopping criterion. `inside` answers
// whether a pixel belongs to the region being traced; (sy,sx) is the start
// pixel and (by,bx) the backtrack pixel (outside the region, 4-adjacent to
// the start).
template <typename InsideFn>
Polyline moore_trace(int sy, int sx, int by, int bx, int h, int w, InsideFn inside) {
  Polyline contour;
  contour.push_back({static_cast<double>(sx), static_cast<double>(sy)});
  int cy = sy, cx = sx;
  int back = dir_index(bx - sx, by - sy);
  const int start_back = back;
  const long max_steps = 8L * h * w + 16;
  long steps = 0;
  while (true) {
    if (++steps > max_steps) throw InvalidInput("contour tracing failed to terminate");
    int found = -1;
    int prev = back;  // direction (from current) of the last empty neighbor
    for (int k = 1; k <= 8; ++k) {
      const int d = (back + k) % 8;
      const int ny = cy + kDy[d];
      const int nx = cx + kDx[d];
      if (ny >= 0 && ny < h && nx >= 0 && nx < w && inside(ny, nx)) {
        found = d;
        break;
      }
      prev = d;
    }
    if (found < 0) break;  // isolated pixel
    // New backtrack pixel = neighbor checked just before the hit.
    const int bpy = cy + kDy[prev];
    const int bpx = cx + kDx[prev];
    cy += kDy[found];
    cx += kDx[found];
    back = dir_index(bpx - cx, bpy - cy);
    // Jacob's stopping criterion: start pixel re-entered with the initial
    // backtrack direction.
    if (cy == sy && cx == sx && back == start_back) break;
    contour.push_back({static_cast<double>(cx), static_cast<double>(cy)});
  }
  return contour;
}

}  // namespace

std::vector<Polyline> trace_contours(const Mask& mask, double min_area) {
  if (mask.count() == 0) throw InvalidInput("empty layer");
  const int h = mask.height, w = mask.width;

  // Label foreground 8-connected components.
  std::vector<int> label(static_cast<size_t>(h) * w, -1);
  int n_comp = 0;
  std::vector<long> comp_area;
  std::vector<std::pair<int, int>> comp_first;  // scan-order first pixel (y,x)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(y, x) || label[static_cast<size_t>(y) * w + x] >= 0) continue;
      const int id = n_comp++;
      comp_area.push_back(0);
      comp_first.push_back({y, x});
      std::deque<std::pair<int, int>> q{{y, x}};
      label[static_cast<size_t>(y) * w + x] = id;
      while (!q.empty()) {
        auto [cy, cx] = q.front();
        q.pop_front();
        comp_area[id]++;
        for (int d = 0; d < 8; ++d) {
          const int ny = cy + kDy[d], nx = cx + kDx[d];
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          if (!mask.test(ny, nx) || label[static_cast<size_t>(ny) * w + nx] >= 0) continue;
          label[static_cast<size_t>(ny) * w + nx] = id;
          q.push_back({ny, nx});
        }
      }
    }
  }

  // Label background 4-connected components; those not touching the border
  // are holes, owned by the component immediately left of their first pixel.
  std::vector<int> bg_label(static_cast<size_t>(h) * w, -1);
  int n_bg = 0;
  std::vector<bool> bg_touches_border;
  std::vector<std::pair<int, int>> bg_first;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.test(y, x) || bg_label[static_cast<size_t>(y) * w + x] >= 0) continue;
      const int id = n_bg++;
      bg_touches_border.push_back(false);
      bg_first.push_back({y, x});
      std::deque<std::pair<int, int>> q{{y, x}};
      bg_label[static_cast<size_t>(y) * w + x] = id;
      while (!q.empty()) {
        auto [cy, cx] = q.front();
        q.pop_front();
        if (cy == 0 || cy == h - 1 || cx == 0 || cx == w - 1) bg_touches_border[id] = true;
        constexpr int d4y[4] = {0, 0, 1, -1};
        constexpr int d4x[4] = {1, -1, 0, 0};
        for (int d = 0; d < 4; ++d) {
          const int ny = cy + d4y[d], nx = cx + d4x[d];
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          if (mask.test(ny, nx) || bg_label[static_cast<size_t>(ny) * w + nx] >= 0) continue;
          bg_label[static_cast<size_t>(ny) * w + nx] = id;
          q.push_back({ny, nx});
        }
      }
    }
  }

  std::vector<Polyline> out;
  auto in_comp = [&](int id) {
    return [&label, w = mask.width, id](int y, int x) { return label[static_cast<size_t>(y) * w + x] == id; };
  };

  for (int id = 0; id < n_comp; ++id) {
    if (comp_area[id] < min_area) continue;
    auto [sy, sx] = comp_first[id];
    // Backtrack left of the scan-order first pixel is outside the component.
    Polyline outer = moore_trace(sy, sx, sy, sx - 1, h, w, in_comp(id));
    if (shoelace(outer) < 0) std::reverse(outer.begin() + 1, outer.end());
    out.push_back(std::move(outer));

    for (int b = 0; b < n_bg; ++b) {
      if (bg_touches_border[b]) continue;
      auto [hy, hx] = bg_first[b];
      // Owner of the hole = component left of its first pixel.
      if (hx == 0 || label[static_cast<size_t>(hy) * w + hx - 1] != id) continue;
      // Trace the inner boundary on foreground pixels, backtracking into the
      // hole.
      Polyline inner = moore_trace(hy, hx - 1, hy, hx, h, w, in_comp(id));
      if (shoelace(inner) > 0) std::reverse(inner.begin() + 1, inner.end());
      out.push_back(std::move(inner));
    }
  }
  return out;
}

namespace {

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  double t = 0;
  if (len2 > 0) t = std::clamp(((p.x - a.x) * abx + (p.y - a.y) * aby) / len2, 0.0, 1.0);
  const double qx = a.x + t * abx, qy = a.y + t * aby;
  return std::hypot(p.x - qx, p.y - qy);
}

}  // namespace

std::vector<Point2> simplify_open(const std::vector<Point2>& poly, double tol) {
  const int n = static_cast<int>(poly.size());
  if (n <= 2) return poly;
  std::vector<bool> keep(n, false);
  keep.front() = keep.back() = true;
  std::vector<std::pair<int, int>> stack{{0, n - 1}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi - lo < 2) continue;
    double best = -1;
    int split = -1;
    for (int i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(poly[i], poly[lo], poly[hi]);
      if (d > best) {
        best = d;
        split = i;
      }
    }
    if (best > tol) {
      keep[split] = true;
      stack.push_back({lo, split});
      stack.push_back({split, hi});
    }
  }
  std::vector<Point2> out;
  for (int i = 0; i < n; ++i)
    if (keep[i]) out.push_back(poly[i]);
  return out;
}

std::vector<Point2> simplify_polyline(const Polyline& poly, double tol) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) throw InvalidInput("polyline needs at least 3 points");
  // Split the ring at the vertex farthest from the first point.
  int far_idx = 1;
  double far_d = -1;
  for (int i = 1; i < n; ++i) {
    const double d = std::hypot(poly[i].x - poly[0].x, poly[i].y - poly[0].y);
    if (d > far_d) {
      far_d = d;
      far_idx = i;
    }
  }
  std::vector<Point2> half1(poly.begin(), poly.begin() + far_idx + 1);
  std::vector<Point2> half2(poly.begin() + far_idx, poly.end());
  half2.push_back(poly[0]);
  std::vector<Point2> s1 = simplify_open(half1, tol);
  std::vector<Point2> s2 = simplify_open(half2, tol);
  std::vector<Point2> out(s1.begin(), s1.end());
  out.insert(out.end(), s2.begin() + 1, s2.end() - 1);
  return out;
}

ImageGray sobel_gradient(const ImageGray& image, const Mask& mask) {
  if (image.height != mask.height || image.width != mask.width)
    throw InvalidInput("sobel_gradient: image and mask dimensions differ");
  const int h = image.height, w = image.width;
  ImageGray out(h, w);
  auto sample = [&](int y, int x) {
    return image.at(std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.test(y, x)) continue;
      const double gx = -sample(y - 1, x - 1) + sample(y - 1, x + 1) - 2 * sample(y, x - 1) +
                        2 * sample(y, x + 1) - sample(y + 1, x - 1) + sample(y + 1, x + 1);
      const double gy = -sample(y - 1, x - 1) - 2 * sample(y - 1, x) - sample(y - 1, x + 1) +
                        sample(y + 1, x - 1) + 2 * sample(y + 1, x) + sample(y + 1, x + 1);
      out.at(y, x) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return out;
}

namespace {

// Spatial hash for min-distance rejection.
class SpacingIndex {
 public:
  explicit SpacingIndex(double radius) : r_(std::max(radius, 1e-9)) {}

  bool blocked(const Point2& p) const {
    const long cx = cell(p.x), cy = cell(p.y);
    for (long gy = cy - 1; gy <= cy + 1; ++gy) {
      for (long gx = cx - 1; gx <= cx + 1; ++gx) {
        auto it = cells_.find(key(gx, gy));
        if (it == cells_.end()) continue;
        for (const Point2& q : it->second) {
          if (std::hypot(p.x - q.x, p.y - q.y) < r_) return true;
        }
      }
    }
    return false;
  }

  void insert(const Point2& p) { cells_[key(cell(p.x), cell(p.y))].push_back(p); }

 private:
  long cell(double v) const { return static_cast<long>(std::floor(v / r_)); }
  static long long key(long x, long y) { return (static_cast<long long>(x) << 32) ^ (y & 0xffffffffLL); }
  double r_;
  std::unordered_map<long long, std::vector<Point2>> cells_;
};

}  // namespace

std::vector<Point2> sample_interior(const ImageGray& grad, const Mask& mask, double spacing, int n_max,
                                    const std::vector<Point2>& blocked) {
  if (spacing <= 0) throw InvalidInput("sample_interior: spacing must be positive");
  struct Cand {
    double mag;
    int y, x;
  };
  std::vector<Cand> cands;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.test(y, x)) cands.push_back({grad.at(y, x), y, x});
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.mag > b.mag; });

  SpacingIndex index(spacing);
  for (const Point2& p : blocked) index.insert(p);
  std::vector<Point2> out;
  for (const Cand& c : cands) {
    if (static_cast<int>(out.size()) >= n_max) break;
    const Point2 p{static_cast<double>(c.x), static_cast<double>(c.y)};
    if (index.blocked(p)) continue;
    index.insert(p);
    out.push_back(p);
  }
  return out;
}

SeedNodes vectorize_layer(const ImageRgb& frame_image, const Mask& mask, int frame,
                          const VectorizerConfig& config) {
  SeedNodes seeds;
  seeds.frame = frame;
  const std::vector<Polyline> contours = trace_contours(mask, config.min_area);
  for (const Polyline& c : contours) {
    if (c.size() < 3) {
      for (const Point2& p : c) seeds.edge_points.push_back(p);
      continue;
    }
    const std::vector<Point2> control = simplify_polyline(c, config.simplify_tol);
    for (const Point2& p : control) seeds.edge_points.push_back(p);
  }
  if (static_cast<int>(seeds.edge_points.size()) > config.max_seed_nodes)
    seeds.edge_points.resize(config.max_seed_nodes);

  const ImageGray gray = luma(frame_image);
  const ImageGray grad = sobel_gradient(gray, mask);
  const int budget = std::min(config.max_interior,
                              config.max_seed_nodes - static_cast<int>(seeds.edge_points.size()));
  if (budget > 0)
    seeds.interior_points = sample_interior(grad, mask, config.spacing, budget, seeds.edge_points);
  return seeds;
}

}  // namespace pvx
