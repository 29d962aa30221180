#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvx/geometry.hpp"
#include "pvx/image.hpp"
#include "pvx/vectorizer.hpp"

namespace pvx {

struct TextureSpec {
  enum class Kind { kConstant, kChecker, kValueNoise, kLinearGradient };
  Kind kind = Kind::kValueNoise;
  double rgb[3] = {0.5, 0.5, 0.5};     // base color
  double rgb2[3] = {0.8, 0.8, 0.8};    // second color (checker / gradient)
  double scale = 12.0;                 // lattice / cell size in px
  double amplitude = 0.3;              // value-noise amplitude
  double dir_x = 1.0, dir_y = 0.0;     // gradient direction
  uint64_t seed = 0;

  void eval(double x, double y, double out[3]) const;
};

// Similarity motion: frame position = center(t) + scale(t) * R(angle(t)) * local.
// center(t) follows either a quadratic polynomial or a Catmull-Rom path
// through waypoints spread uniformly over [0, n_frames-1].
struct MotionModel {
  enum class Kind { kAffine, kPath };
  Kind kind = Kind::kAffine;
  Point2 center0{0, 0};
  Point2 velocity{0, 0};
  Point2 accel{0, 0};
  std::vector<Point2> waypoints;  // kPath only
  double path_duration = 1.0;     // frames spanned by the waypoint sequence
  double angle0 = 0.0;            // radians
  double angular_velocity = 0.0;  // radians / frame
  double scale0 = 1.0;
  double scale_rate = 1.0;        // scale(t) = scale0 * scale_rate^t

  Point2 center(double t) const;
  double angle(double t) const { return angle0 + angular_velocity * t; }
  double scale(double t) const;
  Point2 to_frame(const Point2& local, double t) const;
  Point2 to_local(const Point2& frame_pt, double t) const;
  Point2 map(const Point2& p, double t_from, double t_to) const;
};

struct LayerSpec {
  enum class Shape { kDisk, kRectangle };
  Shape shape = Shape::kRectangle;
  double radius = 10.0;       // kDisk
  double half_w = 10.0, half_h = 10.0;  // kRectangle
  TextureSpec texture;
  MotionModel motion;

  bool contains_local(const Point2& local) const;
};

struct SceneSpec {
  std::string name;
  int height = 64, width = 64, n_frames = 8;
  uint64_t seed = 0;
  TextureSpec background;
  std::vector<LayerSpec> layers;  // index 0 here = layer_id 1 (front-most last)
};

struct GeneratedScene {
  SceneSpec spec;
  FrameSequence frames;
  FrameSequence clean_background;
  std::vector<LayerMaskTrack> layers;   // [0] = background, spans all frames
  std::vector<MotionModel> motions;     // aligned with layers (motions[0] = identity)

  // Front-most layer id containing p at continuous time t (0 = background).
  int owner_at(const Point2& p, double t) const;
  // Visible means: in frame bounds and not covered by a nearer layer.
  bool layer_visible(int layer_id, const Point2& p, double t) const;
  // Color at a continuous spatio-temporal position, no antialiasing.
  void sample_color(const Point2& p, double t, double out[3]) const;
};

GeneratedScene generate(const SceneSpec& spec);

// Antialiased composite at a continuous time; ground truth for temporal
// interpolation.
ImageRgb rasterize_at(const GeneratedScene& scene, double t);

// The fixed desk-scale scene suite (S1..S6).
std::vector<SceneSpec> standard_suite();

}  // namespace pvx
