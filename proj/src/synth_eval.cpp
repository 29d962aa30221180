#include "pvx/synth_eval.hpp"

#include <algorithm>
#include <cmath>

#include "pvx/error.hpp"

namespace pvx {

namespace {

double hash01(int64_t ix, int64_t iy, uint64_t seed) {
  uint64_t h = seed + 0x9E3779B97F4A7C15ull;
  h ^= static_cast<uint64_t>(ix) * 0xBF58476D1CE4E5B9ull;
  h = (h ^ (h >> 30)) * 0x94D049BB133111EBull;
  h ^= static_cast<uint64_t>(iy) * 0xC2B2AE3D27D4EB4Full;
  h = (h ^ (h >> 27)) * 0x2545F4914F6CDD1Dull;
  h ^= h >> 31;
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

double smooth(double u) { return u * u * u * (u * (u * 6 - 15) + 10); }

double value_noise(double x, double y, double scale, uint64_t seed) {
  const double fx = x / scale, fy = y / scale;
  const double ix = std::floor(fx), iy = std::floor(fy);
  const double u = smooth(fx - ix), v = smooth(fy - iy);
  const int64_t cx = static_cast<int64_t>(ix), cy = static_cast<int64_t>(iy);
  const double v00 = hash01(cx, cy, seed), v10 = hash01(cx + 1, cy, seed);
  const double v01 = hash01(cx, cy + 1, seed), v11 = hash01(cx + 1, cy + 1, seed);
  return (v00 * (1 - u) + v10 * u) * (1 - v) + (v01 * (1 - u) + v11 * u) * v;
}

double octave_noise(double x, double y, double scale, uint64_t seed) {
  return 0.65 * value_noise(x, y, scale, seed) + 0.35 * value_noise(x, y, scale * 0.5, seed ^ 0xABCDEF12345ull);
}

}  // namespace

void TextureSpec::eval(double x, double y, double out[3]) const {
  switch (kind) {
    case Kind::kConstant:
      for (int c = 0; c < 3; ++c) out[c] = rgb[c];
      break;
    case Kind::kChecker: {
      const long px = static_cast<long>(std::floor(x / scale));
      const long py = static_cast<long>(std::floor(y / scale));
      const bool odd = ((px + py) & 1) != 0;
      for (int c = 0; c < 3; ++c) out[c] = odd ? rgb2[c] : rgb[c];
      break;
    }
    case Kind::kValueNoise:
      for (int c = 0; c < 3; ++c) {
        const double v = octave_noise(x, y, scale, seed + 0x51ull * (c + 1));
        out[c] = std::clamp(rgb[c] + amplitude * (2.0 * v - 1.0), 0.0, 1.0);
      }
      break;
    case Kind::kLinearGradient: {
      const double len = std::hypot(dir_x, dir_y);
      const double t = len > 0 ? std::clamp((x * dir_x + y * dir_y) / (len * scale), 0.0, 1.0) : 0.0;
      for (int c = 0; c < 3; ++c) out[c] = rgb[c] + (rgb2[c] - rgb[c]) * t;
      break;
    }
  }
}

Point2 MotionModel::center(double t) const {
  if (kind == Kind::kAffine || waypoints.size() < 2) {
    return {center0.x + velocity.x * t + 0.5 * accel.x * t * t,
            center0.y + velocity.y * t + 0.5 * accel.y * t * t};
  }
  // Catmull-Rom through waypoints, uniform over [0, path_duration].
  const int n = static_cast<int>(waypoints.size());
  const double s = std::clamp(t / std::max(path_duration, 1e-9), 0.0, 1.0) * (n - 1);
  const int i = std::min(static_cast<int>(s), n - 2);
  const double u = s - i;
  auto wp = [&](int k) { return waypoints[std::clamp(k, 0, n - 1)]; };
  const Point2 p0 = wp(i - 1), p1 = wp(i), p2 = wp(i + 1), p3 = wp(i + 2);
  auto cr = [&](double a, double b, double c, double d) {
    return 0.5 * ((2 * b) + (-a + c) * u + (2 * a - 5 * b + 4 * c - d) * u * u +
                  (-a + 3 * b - 3 * c + d) * u * u * u);
  };
  return {cr(p0.x, p1.x, p2.x, p3.x), cr(p0.y, p1.y, p2.y, p3.y)};
}

double MotionModel::scale(double t) const { return scale0 * std::pow(scale_rate, t); }

Point2 MotionModel::to_frame(const Point2& local, double t) const {
  const double a = angle(t), s = scale(t);
  const Point2 c = center(t);
  const double ca = std::cos(a), sa = std::sin(a);
  return {c.x + s * (ca * local.x - sa * local.y), c.y + s * (sa * local.x + ca * local.y)};
}

Point2 MotionModel::to_local(const Point2& frame_pt, double t) const {
  const double a = angle(t), s = scale(t);
  const Point2 c = center(t);
  const double dx = (frame_pt.x - c.x) / s, dy = (frame_pt.y - c.y) / s;
  const double ca = std::cos(a), sa = std::sin(a);
  return {ca * dx + sa * dy, -sa * dx + ca * dy};
}

Point2 MotionModel::map(const Point2& p, double t_from, double t_to) const {
  return to_frame(to_local(p, t_from), t_to);
}

bool LayerSpec::contains_local(const Point2& local) const {
  if (shape == Shape::kDisk) return local.x * local.x + local.y * local.y <= radius * radius;
  return std::abs(local.x) <= half_w && std::abs(local.y) <= half_h;
}

int GeneratedScene::owner_at(const Point2& p, double t) const {
  for (int i = static_cast<int>(spec.layers.size()); i >= 1; --i) {
    const LayerSpec& layer = spec.layers[i - 1];
    if (layer.contains_local(layer.motion.to_local(p, t))) return i;
  }
  return 0;
}

bool GeneratedScene::layer_visible(int layer_id, const Point2& p, double t) const {
  if (p.x < -0.5 || p.y < -0.5 || p.x > spec.width - 0.5 || p.y > spec.height - 0.5) return false;
  return owner_at(p, t) == layer_id;
}

void GeneratedScene::sample_color(const Point2& p, double t, double out[3]) const {
  const int owner = owner_at(p, t);
  if (owner == 0) {
    spec.background.eval(p.x, p.y, out);
  } else {
    const LayerSpec& layer = spec.layers[owner - 1];
    const Point2 local = layer.motion.to_local(p, t);
    layer.texture.eval(local.x, local.y, out);
  }
}

ImageRgb rasterize_at(const GeneratedScene& scene, double t) {
  const int h = scene.spec.height, w = scene.spec.width;
  ImageRgb frame(h, w);
  double col[3];
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc[3] = {0, 0, 0};
      for (int sy = 0; sy < 4; ++sy) {
        for (int sx = 0; sx < 4; ++sx) {
          const Point2 sub{x - 0.5 + (sx + 0.5) / 4.0, y - 0.5 + (sy + 0.5) / 4.0};
          scene.sample_color(sub, t, col);
          acc[0] += col[0];
          acc[1] += col[1];
          acc[2] += col[2];
        }
      }
      for (int c = 0; c < 3; ++c) frame.at(y, x, c) = acc[c] / 16.0;
    }
  }
  return frame;
}

GeneratedScene generate(const SceneSpec& spec) {
  if (spec.height <= 0 || spec.width <= 0 || spec.n_frames <= 0)
    throw InvalidInput("invalid scene dimensions");
  for (const LayerSpec& l : spec.layers) {
    if (l.shape == LayerSpec::Shape::kDisk && l.radius <= 0) throw InvalidInput("invalid disk radius");
    if (l.shape == LayerSpec::Shape::kRectangle && (l.half_w <= 0 || l.half_h <= 0))
      throw InvalidInput("invalid rectangle extents");
  }

  GeneratedScene scene;
  scene.spec = spec;
  const int h = spec.height, w = spec.width, n = spec.n_frames;
  const int n_layers = static_cast<int>(spec.layers.size());

  scene.frames.height = h;
  scene.frames.width = w;
  scene.clean_background.height = h;
  scene.clean_background.width = w;

  // Per-layer full-length mask stores; trimmed to lifetimes below.
  std::vector<std::vector<Mask>> fg_masks(n_layers);
  std::vector<Mask> bg_masks;

  for (int t = 0; t < n; ++t) {
    ImageRgb frame(h, w);
    ImageRgb clean(h, w);
    std::vector<Mask> masks(n_layers + 1, Mask(h, w));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc[3] = {0, 0, 0};
        double col[3];
        // 4x4 supersampling over the pixel footprint.
        for (int sy = 0; sy < 4; ++sy) {
          for (int sx = 0; sx < 4; ++sx) {
            const Point2 sub{x - 0.5 + (sx + 0.5) / 4.0, y - 0.5 + (sy + 0.5) / 4.0};
            scene.sample_color(sub, t, col);
            acc[0] += col[0];
            acc[1] += col[1];
            acc[2] += col[2];
          }
        }
        for (int c = 0; c < 3; ++c) frame.at(y, x, c) = acc[c] / 16.0;

        spec.background.eval(x, y, col);
        for (int c = 0; c < 3; ++c) clean.at(y, x, c) = col[c];

        const int owner = scene.owner_at({static_cast<double>(x), static_cast<double>(y)}, t);
        masks[owner].at(y, x) = 1;
      }
    }
    scene.frames.frames.push_back(std::move(frame));
    scene.clean_background.frames.push_back(std::move(clean));
    bg_masks.push_back(std::move(masks[0]));
    for (int i = 0; i < n_layers; ++i) fg_masks[i].push_back(std::move(masks[i + 1]));
  }

  LayerMaskTrack bg;
  bg.layer_id = 0;
  bg.t_start = 0;
  bg.t_end = n - 1;
  bg.masks = std::move(bg_masks);
  scene.layers.push_back(std::move(bg));
  scene.motions.push_back(MotionModel{});  // identity

  for (int i = 0; i < n_layers; ++i) {
    int t_s = -1, t_e = -1;
    for (int t = 0; t < n; ++t) {
      if (fg_masks[i][t].count() > 0) {
        if (t_s < 0) t_s = t;
        t_e = t;
      }
    }
    if (t_s < 0) throw InvalidInput("layer never visible in the generated scene");
    for (int t = t_s; t <= t_e; ++t) {
      if (fg_masks[i][t].count() == 0) throw InvalidInput("layer visibility is not contiguous");
    }
    LayerMaskTrack track;
    track.layer_id = i + 1;
    track.t_start = t_s;
    track.t_end = t_e;
    track.masks.assign(fg_masks[i].begin() + t_s, fg_masks[i].begin() + t_e + 1);
    scene.layers.push_back(std::move(track));
    scene.motions.push_back(spec.layers[i].motion);
  }
  return scene;
}

std::vector<SceneSpec> standard_suite() {
  std::vector<SceneSpec> suite;

  auto noise = [](double r, double g, double b, double amp, double scale, uint64_t seed) {
    TextureSpec t;
    t.kind = TextureSpec::Kind::kValueNoise;
    t.rgb[0] = r;
    t.rgb[1] = g;
    t.rgb[2] = b;
    t.amplitude = amp;
    t.scale = scale;
    t.seed = seed;
    return t;
  };

  {
    SceneSpec s;
    s.name = "s1_static";
    s.height = 48;
    s.width = 48;
    s.n_frames = 8;
    s.seed = 101;
    s.background = noise(0.45, 0.48, 0.52, 0.3, 10, 11);
    suite.push_back(s);
  }
  {
    SceneSpec s;
    s.name = "s2_translate";
    s.height = 64;
    s.width = 64;
    s.n_frames = 16;
    s.seed = 102;
    s.background = noise(0.38, 0.42, 0.48, 0.28, 14, 21);
    LayerSpec sq;
    sq.shape = LayerSpec::Shape::kRectangle;
    sq.half_w = 12;
    sq.half_h = 12;
    sq.texture = noise(0.6, 0.38, 0.3, 0.32, 7, 22);
    sq.motion.center0 = {18, 26};
    sq.motion.velocity = {2, 1};
    s.layers.push_back(sq);
    suite.push_back(s);
  }
  {
    SceneSpec s;
    s.name = "s3_rotate_scale";
    s.height = 96;
    s.width = 96;
    s.n_frames = 24;
    s.seed = 103;
    s.background = noise(0.42, 0.45, 0.5, 0.3, 16, 31);
    LayerSpec disk;
    disk.shape = LayerSpec::Shape::kDisk;
    disk.radius = 18;
    disk.texture = noise(0.55, 0.42, 0.32, 0.35, 6, 32);
    disk.motion.center0 = {38, 40};
    disk.motion.velocity = {0.8, 0.5};
    disk.motion.angular_velocity = 0.05236;  // 3 deg/frame
    disk.motion.scale_rate = 1.006;
    s.layers.push_back(disk);
    suite.push_back(s);
  }
  {
    SceneSpec s;
    s.name = "s4_exit";
    s.height = 96;
    s.width = 96;
    s.n_frames = 20;
    s.seed = 104;
    s.background = noise(0.4, 0.46, 0.5, 0.3, 13, 41);
    LayerSpec sq;
    sq.shape = LayerSpec::Shape::kRectangle;
    sq.half_w = 30;
    sq.half_h = 30;
    sq.texture = noise(0.58, 0.4, 0.34, 0.3, 8, 42);
    sq.motion.center0 = {34, 48};
    sq.motion.velocity = {6, 0};
    s.layers.push_back(sq);
    suite.push_back(s);
  }
  {
    SceneSpec s;
    s.name = "s5_occlusion";
    s.height = 96;
    s.width = 96;
    s.n_frames = 20;
    s.seed = 105;
    s.background = noise(0.44, 0.47, 0.52, 0.3, 12, 51);
    LayerSpec disk;
    disk.shape = LayerSpec::Shape::kDisk;
    disk.radius = 16;
    disk.texture = noise(0.56, 0.4, 0.32, 0.32, 5, 52);
    disk.motion.center0 = {24, 48};
    disk.motion.velocity = {2.6, 0};
    s.layers.push_back(disk);
    LayerSpec rect;
    rect.shape = LayerSpec::Shape::kRectangle;
    rect.half_w = 10;
    rect.half_h = 14;
    rect.texture = noise(0.35, 0.52, 0.4, 0.32, 6, 53);
    rect.motion.center0 = {70, 20};
    rect.motion.velocity = {-2.2, 1.5};
    s.layers.push_back(rect);
    suite.push_back(s);
  }
  {
    SceneSpec s;
    s.name = "s6_large_motion";
    s.height = 96;
    s.width = 96;
    s.n_frames = 6;
    s.seed = 106;
    s.background = noise(0.42, 0.46, 0.5, 0.3, 12, 61);
    LayerSpec sq;
    sq.shape = LayerSpec::Shape::kRectangle;
    sq.half_w = 10;
    sq.half_h = 10;
    sq.texture = noise(0.58, 0.4, 0.32, 0.34, 5, 62);
    sq.motion.center0 = {12, 44};
    sq.motion.velocity = {12, 1};
    s.layers.push_back(sq);
    suite.push_back(s);
  }
  return suite;
}

}  // namespace pvx
