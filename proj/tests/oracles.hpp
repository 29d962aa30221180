// Independent test-side oracles. These deliberately re-derive results with
// the most direct method available (brute force, enumeration, finite
// differences) and must stay decoupled from the library implementations
// they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "pvx/geometry.hpp"
#include "pvx/image.hpp"

namespace oracle {

// Circumcenter via perpendicular-bisector solve; nullopt for degenerate
// triangles.
struct Circle {
  double cx, cy, r;
};
inline std::optional<Circle> circumcircle(const pvx::Point2& a, const pvx::Point2& b, const pvx::Point2& c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  if (std::abs(d) < 1e-12) return std::nullopt;
  const double a2 = a.x * a.x + a.y * a.y;
  const double b2 = b.x * b.x + b.y * b.y;
  const double c2 = c.x * c.x + c.y * c.y;
  const double ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
  const double uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
  return Circle{ux, uy, std::hypot(a.x - ux, a.y - uy)};
}

// Counts (triangle, vertex) pairs violating the empty-circumcircle property
// beyond the relative tolerance.
inline int circumcircle_violations(const pvx::Triangulation& tri, double rel_tol = 1e-7) {
  int violations = 0;
  for (const pvx::Triangle& t : tri.triangles) {
    const auto circle = circumcircle(tri.vertices[t.v[0]], tri.vertices[t.v[1]], tri.vertices[t.v[2]]);
    if (!circle) {
      ++violations;
      continue;
    }
    for (int v = 0; v < static_cast<int>(tri.vertices.size()); ++v) {
      if (v == t.v[0] || v == t.v[1] || v == t.v[2]) continue;
      const double dist = std::hypot(tri.vertices[v].x - circle->cx, tri.vertices[v].y - circle->cy);
      if (dist < circle->r * (1.0 - rel_tol)) ++violations;
    }
  }
  return violations;
}

// Exhaustive containing-triangle scan (lowest index wins), tolerance
// matching the library's inside test.
inline int locate_exhaustive(const pvx::Point2& p, const pvx::Triangulation& tri) {
  for (int t = 0; t < static_cast<int>(tri.triangles.size()); ++t) {
    const pvx::Triangle& tr = tri.triangles[t];
    const pvx::Point2& a = tri.vertices[tr.v[0]];
    const pvx::Point2& b = tri.vertices[tr.v[1]];
    const pvx::Point2& c = tri.vertices[tr.v[2]];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double l2 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    const double l3 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    const double l1 = 1.0 - l2 - l3;
    if (l1 >= -1e-9 && l2 >= -1e-9 && l3 >= -1e-9) return t;
  }
  return -1;
}

// Convex hull area (Andrew monotone chain), for the no-holes/no-overlap
// union check.
inline double convex_hull_area(std::vector<pvx::Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const pvx::Point2& a, const pvx::Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  auto cross = [](const pvx::Point2& o, const pvx::Point2& a, const pvx::Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  const int n = static_cast<int>(pts.size());
  std::vector<pvx::Point2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  double area = 0;
  for (size_t i = 0; i < hull.size(); ++i) {
    const pvx::Point2& p = hull[i];
    const pvx::Point2& q = hull[(i + 1) % hull.size()];
    area += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(area);
}

inline double triangles_total_area(const pvx::Triangulation& tri) {
  double area = 0;
  for (const pvx::Triangle& t : tri.triangles)
    area += std::abs(pvx::signed_area(tri.vertices[t.v[0]], tri.vertices[t.v[1]], tri.vertices[t.v[2]]));
  return area;
}

// Plain recursive Douglas-Peucker (open polyline).
inline void dp_recursive(const std::vector<pvx::Point2>& pts, int lo, int hi, double tol,
                         std::vector<bool>& keep) {
  if (hi - lo < 2) return;
  double best = -1;
  int split = -1;
  for (int i = lo + 1; i < hi; ++i) {
    const pvx::Point2& a = pts[lo];
    const pvx::Point2& b = pts[hi];
    const double abx = b.x - a.x, aby = b.y - a.y;
    const double len2 = abx * abx + aby * aby;
    double t = 0;
    if (len2 > 0) t = std::clamp(((pts[i].x - a.x) * abx + (pts[i].y - a.y) * aby) / len2, 0.0, 1.0);
    const double d = std::hypot(pts[i].x - (a.x + t * abx), pts[i].y - (a.y + t * aby));
    if (d > best) {
      best = d;
      split = i;
    }
  }
  if (best > tol) {
    keep[split] = true;
    dp_recursive(pts, lo, split, tol, keep);
    dp_recursive(pts, split, hi, tol, keep);
  }
}

inline std::vector<pvx::Point2> dp_reference(const std::vector<pvx::Point2>& pts, double tol) {
  std::vector<bool> keep(pts.size(), false);
  keep.front() = keep.back() = true;
  dp_recursive(pts, 0, static_cast<int>(pts.size()) - 1, tol, keep);
  std::vector<pvx::Point2> out;
  for (size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(pts[i]);
  return out;
}

// Brute-force greedy interior sampler matching the spec's tie-break rule.
inline std::vector<pvx::Point2> greedy_sample_reference(const pvx::ImageGray& grad, const pvx::Mask& mask,
                                                        double spacing, int n_max,
                                                        const std::vector<pvx::Point2>& blocked) {
  struct C {
    double mag;
    int y, x;
  };
  std::vector<C> cands;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.test(y, x)) cands.push_back({grad.at(y, x), y, x});
  std::stable_sort(cands.begin(), cands.end(), [](const C& a, const C& b) { return a.mag > b.mag; });
  std::vector<pvx::Point2> chosen;
  for (const C& c : cands) {
    if (static_cast<int>(chosen.size()) >= n_max) break;
    bool ok = true;
    for (const pvx::Point2& p : blocked)
      if (std::hypot(p.x - c.x, p.y - c.y) < spacing) ok = false;
    for (const pvx::Point2& p : chosen)
      if (std::hypot(p.x - c.x, p.y - c.y) < spacing) ok = false;
    if (ok) chosen.push_back({static_cast<double>(c.x), static_cast<double>(c.y)});
  }
  return chosen;
}

// Max in-mask distance to the nearest node, by direct per-pixel search.
inline double max_coverage_distance(const pvx::Mask& mask, const std::vector<pvx::Point2>& nodes) {
  double worst = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.test(y, x)) continue;
      double best = std::numeric_limits<double>::infinity();
      for (const pvx::Point2& p : nodes) best = std::min(best, std::hypot(p.x - x, p.y - y));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

// Direct-formula SSIM with explicit window loops (valid windows only).
inline double ssim_reference(const pvx::ImageRgb& a, const pvx::ImageRgb& b) {
  const int h = a.height, w = a.width, win = 11, r = win / 2;
  std::vector<double> kernel(win);
  double ksum = 0;
  for (int i = 0; i < win; ++i) {
    const double d = i - r;
    kernel[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    ksum += kernel[i];
  }
  for (double& v : kernel) v /= ksum;
  const double c1 = 1e-4, c2 = 9e-4;
  double total = 0;
  for (int ch = 0; ch < 3; ++ch) {
    double s = 0;
    long count = 0;
    for (int y = r; y < h - r; ++y) {
      for (int x = r; x < w - r; ++x) {
        double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double kw = kernel[dy + r] * kernel[dx + r];
            const double va = a.at(y + dy, x + dx, ch);
            const double vb = b.at(y + dy, x + dx, ch);
            ma += kw * va;
            mb += kw * vb;
            maa += kw * va * va;
            mbb += kw * vb * vb;
            mab += kw * va * vb;
          }
        }
        const double vara = maa - ma * ma, varb = mbb - mb * mb, cov = mab - ma * mb;
        s += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (vara + varb + c2));
        ++count;
      }
    }
    total += s / count;
  }
  return total / 3.0;
}

}  // namespace oracle
