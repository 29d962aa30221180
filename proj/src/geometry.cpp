#include "pvx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

#include "pvx/error.hpp"

namespace pvx {

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

const std::vector<int> GridLocator::kEmpty;

GridLocator::GridLocator(const std::vector<Point2>& vertices, const std::vector<Triangle>& triangles) {
  if (vertices.empty() || triangles.empty()) return;
  double max_x = vertices[0].x, max_y = vertices[0].y;
  min_x_ = vertices[0].x;
  min_y_ = vertices[0].y;
  for (const Point2& v : vertices) {
    min_x_ = std::min(min_x_, v.x);
    min_y_ = std::min(min_y_, v.y);
    max_x = std::max(max_x, v.x);
    max_y = std::max(max_y, v.y);
  }
  const int cells = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(triangles.size())))));
  nx_ = cells;
  ny_ = cells;
  cell_w_ = std::max((max_x - min_x_) / nx_, 1e-12);
  cell_h_ = std::max((max_y - min_y_) / ny_, 1e-12);
  cells_.assign(static_cast<size_t>(nx_) * ny_, {});
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    const Triangle& tr = triangles[t];
    double tmin_x = vertices[tr.v[0]].x, tmax_x = tmin_x;
    double tmin_y = vertices[tr.v[0]].y, tmax_y = tmin_y;
    for (int k = 1; k < 3; ++k) {
      tmin_x = std::min(tmin_x, vertices[tr.v[k]].x);
      tmax_x = std::max(tmax_x, vertices[tr.v[k]].x);
      tmin_y = std::min(tmin_y, vertices[tr.v[k]].y);
      tmax_y = std::max(tmax_y, vertices[tr.v[k]].y);
    }
    int cx0 = std::clamp(static_cast<int>((tmin_x - min_x_) / cell_w_), 0, nx_ - 1);
    int cx1 = std::clamp(static_cast<int>((tmax_x - min_x_) / cell_w_), 0, nx_ - 1);
    int cy0 = std::clamp(static_cast<int>((tmin_y - min_y_) / cell_h_), 0, ny_ - 1);
    int cy1 = std::clamp(static_cast<int>((tmax_y - min_y_) / cell_h_), 0, ny_ - 1);
    for (int cy = cy0; cy <= cy1; ++cy)
      for (int cx = cx0; cx <= cx1; ++cx) cells_[static_cast<size_t>(cy) * nx_ + cx].push_back(t);
  }
  // Lists come out sorted already (triangles appended in index order).
}

bool GridLocator::inside_bounds(const Point2& p) const {
  if (nx_ == 0) return false;
  return p.x >= min_x_ - 1e-9 && p.y >= min_y_ - 1e-9 && p.x <= min_x_ + nx_ * cell_w_ + 1e-9 &&
         p.y <= min_y_ + ny_ * cell_h_ + 1e-9;
}

const std::vector<int>& GridLocator::candidates(const Point2& p) const {
  if (nx_ == 0) return kEmpty;
  int cx = std::clamp(static_cast<int>((p.x - min_x_) / cell_w_), 0, nx_ - 1);
  int cy = std::clamp(static_cast<int>((p.y - min_y_) / cell_h_), 0, ny_ - 1);
  return cells_[static_cast<size_t>(cy) * nx_ + cx];
}

void Triangulation::build_locator() { locator_ = GridLocator(vertices, triangles); }

namespace {

void require_finite(const std::vector<Point2>& points) {
  for (const Point2& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("non-finite point coordinate");
  }
}

// True when p lies strictly inside the circumcircle of CCW triangle (a,b,c)
// beyond floating-point noise. The determinant is compared against an error
// bound built from the magnitudes of its terms, so the test stays correctly
// scaled for small triangles inside large point sets; values inside the
// noise band count as cocircular.
bool incircle_strict(const Point2& a, const Point2& b, const Point2& c, const Point2& p) {
  const double ax = a.x - p.x, ay = a.y - p.y;
  const double bx = b.x - p.x, by = b.y - p.y;
  const double cx = c.x - p.x, cy = c.y - p.y;
  const double a2 = ax * ax + ay * ay;
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  const double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
  const double perm = std::abs(ax) * (std::abs(by) * c2 + b2 * std::abs(cy)) +
                      std::abs(ay) * (std::abs(bx) * c2 + b2 * std::abs(cx)) +
                      a2 * (std::abs(bx) * std::abs(cy) + std::abs(by) * std::abs(cx));
  return det > 1e-14 * perm;
}

struct BwTriangle {
  int a, b, c;
  bool alive = true;
};

}  // namespace

Triangulation delaunay(const std::vector<Point2>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw InvalidInput("degenerate point set: fewer than 3 points");
  require_finite(points);

  // Duplicate detection by x-sorted sweep.
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
      return points[i].x < points[j].x || (points[i].x == points[j].x && points[i].y < points[j].y);
    });
    for (int i = 0; i + 1 < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (points[order[j]].x - points[order[i]].x > kDuplicateTol) break;
        const double dx = points[order[j]].x - points[order[i]].x;
        const double dy = points[order[j]].y - points[order[i]].y;
        if (dx * dx + dy * dy < kDuplicateTol * kDuplicateTol)
          throw InvalidInput("duplicate points in triangulation input");
      }
    }
  }

  double min_x = points[0].x, max_x = points[0].x, min_y = points[0].y, max_y = points[0].y;
  for (const Point2& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double cx = 0.5 * (min_x + max_x);
  const double cy = 0.5 * (min_y + max_y);
  const double diag = std::max({max_x - min_x, max_y - min_y, 1.0});

  std::vector<Point2> verts = points;
  const double r = 2000.0 * diag;
  const int s0 = n, s1 = n + 1, s2 = n + 2;
  verts.push_back({cx, cy + r});
  verts.push_back({cx - r * 0.8660254037844386, cy - r * 0.5});
  verts.push_back({cx + r * 0.8660254037844386, cy - r * 0.5});

  std::vector<BwTriangle> tris;
  {
    // Keep CCW orientation.
    BwTriangle t{s0, s1, s2};
    if (signed_area(verts[t.a], verts[t.b], verts[t.c]) < 0) std::swap(t.b, t.c);
    tris.push_back(t);
  }

  std::vector<int> bad;
  for (int ip = 0; ip < n; ++ip) {
    const Point2& p = verts[ip];
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      if (incircle_strict(verts[tris[t].a], verts[tris[t].b], verts[tris[t].c], p)) bad.push_back(t);
    }
    if (bad.empty()) throw InvalidInput("triangulation insertion failed: point outside all circumcircles");

    // Cavity boundary = directed edges of bad triangles whose reverse is not
    // in the bad set. Expand the cavity if a fan triangle would be degenerate
    // (point numerically on the boundary edge).
    std::vector<std::pair<int, int>> boundary;
    for (int repair = 0; repair < n + 4; ++repair) {
      std::map<std::pair<int, int>, int> edges;
      for (int t : bad) {
        const BwTriangle& bt = tris[t];
        edges[{bt.a, bt.b}]++;
        edges[{bt.b, bt.c}]++;
        edges[{bt.c, bt.a}]++;
      }
      boundary.clear();
      for (const auto& [e, cnt] : edges) {
        (void)cnt;
        if (!edges.count({e.second, e.first})) boundary.push_back(e);
      }
      int degenerate_opposite = -1;
      for (const auto& e : boundary) {
        if (std::abs(signed_area(p, verts[e.first], verts[e.second])) >= kDegenerateAreaTol) continue;
        // Find the alive triangle on the far side of this edge and absorb it.
        for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
          if (!tris[t].alive || std::find(bad.begin(), bad.end(), t) != bad.end()) continue;
          const BwTriangle& bt = tris[t];
          const bool has = (bt.a == e.second && bt.b == e.first) || (bt.b == e.second && bt.c == e.first) ||
                           (bt.c == e.second && bt.a == e.first);
          if (has) {
            degenerate_opposite = t;
            break;
          }
        }
        if (degenerate_opposite >= 0) break;
      }
      if (degenerate_opposite < 0) break;
      bad.push_back(degenerate_opposite);
    }

    for (int t : bad) tris[t].alive = false;
    for (const auto& e : boundary) {
      BwTriangle nt{ip, e.first, e.second};
      if (signed_area(verts[nt.a], verts[nt.b], verts[nt.c]) < 0) std::swap(nt.b, nt.c);
      tris.push_back(nt);
    }
  }

  Triangulation out;
  out.vertices = points;
  for (const BwTriangle& t : tris) {
    if (!t.alive) continue;
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    Triangle tr{{t.a, t.b, t.c}};
    // Canonical rotation: smallest index first, CCW preserved.
    int rot = 0;
    if (tr.v[1] < tr.v[0] && tr.v[1] <= tr.v[2]) rot = 1;
    if (tr.v[2] < tr.v[0] && tr.v[2] < tr.v[1]) rot = 2;
    Triangle canon{{tr.v[rot], tr.v[(rot + 1) % 3], tr.v[(rot + 2) % 3]}};
    out.triangles.push_back(canon);
  }
  if (out.triangles.empty()) throw InvalidInput("degenerate point set: all points collinear");
  std::sort(out.triangles.begin(), out.triangles.end(),
            [](const Triangle& l, const Triangle& r) { return l.v < r.v; });
  out.build_locator();
  return out;
}

BarycentricCoords barycentric(const Point2& p, int tri_index, const Triangulation& tri) {
  const Triangle& t = tri.triangles.at(tri_index);
  const Point2& a = tri.vertices[t.v[0]];
  const Point2& b = tri.vertices[t.v[1]];
  const Point2& c = tri.vertices[t.v[2]];
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  if (std::abs(det) < 2.0 * kDegenerateAreaTol) throw InvalidInput("zero-area triangle");
  const double l2 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
  const double l3 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
  return BarycentricCoords{1.0 - l2 - l3, l2, l3, tri_index};
}

std::optional<BarycentricCoords> locate(const Point2& p, const Triangulation& tri) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("non-finite query point");
  if (!tri.locator().inside_bounds(p)) return std::nullopt;
  for (int t : tri.locator().candidates(p)) {
    BarycentricCoords bc = barycentric(p, t, tri);
    if (bc.lambda1 >= -kInsideTol && bc.lambda2 >= -kInsideTol && bc.lambda3 >= -kInsideTol) return bc;
  }
  return std::nullopt;
}

namespace {

// Closest point on segment ab to p, as the parameter t in [0,1].
double closest_on_segment(const Point2& p, const Point2& a, const Point2& b) {
  const double abx = b.x - a.x, aby = b.y - a.y;
  const double len2 = abx * abx + aby * aby;
  if (len2 <= 0) return 0.0;
  const double t = ((p.x - a.x) * abx + (p.y - a.y) * aby) / len2;
  return std::clamp(t, 0.0, 1.0);
}

}  // namespace

BarycentricCoords nearest_triangle_extension(const Point2& p, const Triangulation& tri) {
  if (auto inside = locate(p, tri)) return *inside;

  double best_d2 = std::numeric_limits<double>::infinity();
  BarycentricCoords best;
  for (int t = 0; t < static_cast<int>(tri.triangles.size()); ++t) {
    const Triangle& tr = tri.triangles[t];
    const Point2& a = tri.vertices[tr.v[0]];
    const Point2& b = tri.vertices[tr.v[1]];
    const Point2& c = tri.vertices[tr.v[2]];
    // Cheap reject via bounding box distance.
    const double bx0 = std::min({a.x, b.x, c.x}), bx1 = std::max({a.x, b.x, c.x});
    const double by0 = std::min({a.y, b.y, c.y}), by1 = std::max({a.y, b.y, c.y});
    const double dx = std::max({bx0 - p.x, 0.0, p.x - bx1});
    const double dy = std::max({by0 - p.y, 0.0, p.y - by1});
    if (dx * dx + dy * dy >= best_d2) continue;

    BarycentricCoords bc = barycentric(p, t, tri);
    double l1 = bc.lambda1, l2 = bc.lambda2, l3 = bc.lambda3;
    if (l1 < 0 || l2 < 0 || l3 < 0) {
      // Project onto the nearest of the three edges.
      const std::array<std::pair<const Point2*, const Point2*>, 3> edges{
          {{&a, &b}, {&b, &c}, {&c, &a}}};
      double edge_best = std::numeric_limits<double>::infinity();
      double w[3] = {0, 0, 0};
      for (int e = 0; e < 3; ++e) {
        const double s = closest_on_segment(p, *edges[e].first, *edges[e].second);
        const double qx = edges[e].first->x + s * (edges[e].second->x - edges[e].first->x);
        const double qy = edges[e].first->y + s * (edges[e].second->y - edges[e].first->y);
        const double d2 = (p.x - qx) * (p.x - qx) + (p.y - qy) * (p.y - qy);
        if (d2 < edge_best) {
          edge_best = d2;
          w[0] = w[1] = w[2] = 0;
          w[e] = 1.0 - s;
          w[(e + 1) % 3] = s;
        }
      }
      l1 = w[0];
      l2 = w[1];
      l3 = w[2];
    }
    const double qx = l1 * a.x + l2 * b.x + l3 * c.x;
    const double qy = l1 * a.y + l2 * b.y + l3 * c.y;
    const double d2 = (p.x - qx) * (p.x - qx) + (p.y - qy) * (p.y - qy);
    if (d2 < best_d2) {
      best_d2 = d2;
      const double sum = l1 + l2 + l3;
      best = BarycentricCoords{l1 / sum, l2 / sum, l3 / sum, t};
    }
  }
  if (best.triangle_index < 0) throw InvalidInput("nearest_triangle_extension on empty triangulation");
  return best;
}

}  // namespace pvx
