#pragma once

#include <array>
#include <optional>
#include <vector>

namespace pvx {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Triangle {
  std::array<int, 3> v{};
};

struct BarycentricCoords {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  int triangle_index = -1;
};

// |signed area| below this classifies a triangle as degenerate (px^2).
inline constexpr double kDegenerateAreaTol = 1e-12;
// Points closer than this are considered coincident (px).
inline constexpr double kDuplicateTol = 1e-9;
// Barycentric weights >= -kInsideTol count as inside.
inline constexpr double kInsideTol = 1e-9;

double signed_area(const Point2& a, const Point2& b, const Point2& c);

// Uniform-grid spatial index over triangle bounding boxes; ceil(sqrt(#tri))
// cells per axis. Candidate lists are kept sorted so queries scan triangles
// in index order.
class GridLocator {
 public:
  GridLocator() = default;
  GridLocator(const std::vector<Point2>& vertices, const std::vector<Triangle>& triangles);

  const std::vector<int>& candidates(const Point2& p) const;
  bool inside_bounds(const Point2& p) const;

 private:
  double min_x_ = 0, min_y_ = 0, cell_w_ = 1, cell_h_ = 1;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> cells_;
  static const std::vector<int> kEmpty;
};

class Triangulation {
 public:
  std::vector<Point2> vertices;
  std::vector<Triangle> triangles;

  void build_locator();
  const GridLocator& locator() const { return locator_; }

 private:
  GridLocator locator_;
};

// Bowyer-Watson incremental insertion with a super-triangle. Deterministic
// for a fixed input ordering; cocircular ties keep the diagonal formed by
// earlier insertions. Rejects duplicate points (merge is the caller's job)
// and point sets with fewer than 3 non-collinear points.
Triangulation delaunay(const std::vector<Point2>& points);

// Solves the 2x2 system for the weights of p in the given triangle.
BarycentricCoords barycentric(const Point2& p, int tri_index, const Triangulation& tri);

// Containing triangle and weights, or nullopt when p is outside the convex
// hull. Boundary points go to the lowest-index incident triangle.
std::optional<BarycentricCoords> locate(const Point2& p, const Triangulation& tri);

// Closest-point fallback for points outside the hull: returns the triangle
// whose closest point to p is nearest, with the weights of that closest
// point (clamped to [0,1], sum 1). Inside the hull this is identical to
// locate().
BarycentricCoords nearest_triangle_extension(const Point2& p, const Triangulation& tri);

}  // namespace pvx
