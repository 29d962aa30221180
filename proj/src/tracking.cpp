#include "pvx/tracking.hpp"

#include <algorithm>
#include <cmath>

#include "pvx/error.hpp"

namespace pvx {

namespace {

void validate_query(const TrackerQuery& q, int n_frames, int h, int w) {
  if (q.source_frame < 0 || q.source_frame >= n_frames || q.target_frame < 0 || q.target_frame >= n_frames)
    throw InvalidInput("tracker query frame out of range");
  for (const Point2& p : q.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidInput("non-finite tracker query point");
    if (p.x < -0.5 || p.y < -0.5 || p.x > w - 0.5 || p.y > h - 0.5)
      throw InvalidInput("tracker query point outside frame bounds");
  }
}

}  // namespace

TrackerResult OracleTracker::track(const TrackerQuery& query) const {
  validate_query(query, scene_->frames.frame_count(), scene_->spec.height, scene_->spec.width);
  TrackerResult result;
  result.points.reserve(query.points.size());
  result.confidence.reserve(query.points.size());
  const double t0 = query.source_frame;
  const double t1 = query.target_frame;
  for (const Point2& p : query.points) {
    const int layer = scene_->owner_at(p, t0);
    const Point2 mapped = scene_->motions[layer].map(p, t0, t1);
    result.points.push_back(mapped);
    result.confidence.push_back(scene_->layer_visible(layer, mapped, t1) ? 1.0 : 0.0);
  }
  return result;
}

namespace {

// 5-tap binomial blur + decimation by 2.
ImageGray downsample(const ImageGray& img) {
  static const double k[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  const int h = img.height, w = img.width;
  ImageGray tmp(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * img.at(y, std::clamp(x + i, 0, w - 1));
      tmp.at(y, x) = s;
    }
  const int nh = (h + 1) / 2, nw = (w + 1) / 2;
  ImageGray out(nh, nw);
  for (int y = 0; y < nh; ++y)
    for (int x = 0; x < nw; ++x) {
      double s = 0;
      for (int i = -2; i <= 2; ++i) s += k[i + 2] * tmp.at(std::clamp(2 * y + i, 0, h - 1), 2 * x);
      out.at(y, x) = s;
    }
  return out;
}

double bilinear(const ImageGray& img, double x, double y) {
  x = std::clamp(x, 0.0, img.width - 1.0);
  y = std::clamp(y, 0.0, img.height - 1.0);
  const int x0 = std::min(static_cast<int>(x), img.width - 2 >= 0 ? img.width - 2 : 0);
  const int y0 = std::min(static_cast<int>(y), img.height - 2 >= 0 ? img.height - 2 : 0);
  const double u = x - x0, v = y - y0;
  const int x1 = std::min(x0 + 1, img.width - 1), y1 = std::min(y0 + 1, img.height - 1);
  return (img.at(y0, x0) * (1 - u) + img.at(y0, x1) * u) * (1 - v) +
         (img.at(y1, x0) * (1 - u) + img.at(y1, x1) * u) * v;
}

}  // namespace

LkTracker::LkTracker(const FrameSequence& video, LkParams params) : params_(params) {
  if (params_.window % 2 == 0) throw InvalidInput("LK window must be odd");
  if (params_.levels < 1) throw InvalidInput("LK needs at least one pyramid level");
  height_ = video.height;
  width_ = video.width;
  pyramids_.reserve(video.frames.size());
  for (const ImageRgb& frame : video.frames) {
    std::vector<ImageGray> pyr;
    pyr.push_back(luma(frame));
    for (int l = 1; l < params_.levels; ++l) {
      if (pyr.back().height < 8 || pyr.back().width < 8) break;
      pyr.push_back(downsample(pyr.back()));
    }
    pyramids_.push_back(std::move(pyr));
  }
}

TrackerResult LkTracker::track(const TrackerQuery& query) const {
  validate_query(query, static_cast<int>(pyramids_.size()), height_, width_);
  TrackerResult result;
  result.points.resize(query.points.size());
  result.confidence.resize(query.points.size());

  if (query.source_frame == query.target_frame) {
    result.points = query.points;
    std::fill(result.confidence.begin(), result.confidence.end(), 1.0);
    return result;
  }

  const auto& src_pyr = pyramids_[query.source_frame];
  const auto& tgt_pyr = pyramids_[query.target_frame];
  const int levels = static_cast<int>(std::min(src_pyr.size(), tgt_pyr.size()));
  const int half = params_.window / 2;
  const int npix = params_.window * params_.window;

  for (size_t i = 0; i < query.points.size(); ++i) {
    const Point2 p = query.points[i];
    double dx = 0, dy = 0;  // displacement at the current level
    double conf = 0;
    bool diverged = false;

    for (int level = levels - 1; level >= 0; --level) {
      const ImageGray& src = src_pyr[level];
      const ImageGray& tgt = tgt_pyr[level];
      const double scale = 1.0 / (1 << level);
      const double px = p.x * scale, py = p.y * scale;

      // Structure tensor and gradients on the source window.
      double gxx = 0, gxy = 0, gyy = 0;
      std::vector<double> ix(npix), iy(npix), iv(npix);
      int k = 0;
      for (int wy = -half; wy <= half; ++wy) {
        for (int wx = -half; wx <= half; ++wx, ++k) {
          const double sx = px + wx, sy = py + wy;
          ix[k] = 0.5 * (bilinear(src, sx + 1, sy) - bilinear(src, sx - 1, sy));
          iy[k] = 0.5 * (bilinear(src, sx, sy + 1) - bilinear(src, sx, sy - 1));
          iv[k] = bilinear(src, sx, sy);
          gxx += ix[k] * ix[k];
          gxy += ix[k] * iy[k];
          gyy += iy[k] * iy[k];
        }
      }
      const double det = gxx * gyy - gxy * gxy;
      const double tr = gxx + gyy;
      const double lambda_min = 0.5 * (tr - std::sqrt(std::max(tr * tr - 4 * det, 0.0)));
      if (level == 0) conf = std::min(1.0, (lambda_min / npix) / params_.eig_ref);
      if (det < 1e-14) continue;  // untrackable at this level

      for (int iter = 0; iter < params_.iterations; ++iter) {
        double bx = 0, by = 0;
        k = 0;
        for (int wy = -half; wy <= half; ++wy) {
          for (int wx = -half; wx <= half; ++wx, ++k) {
            const double diff = iv[k] - bilinear(tgt, px + dx + wx, py + dy + wy);
            bx += diff * ix[k];
            by += diff * iy[k];
          }
        }
        const double ux = (gyy * bx - gxy * by) / det;
        const double uy = (gxx * by - gxy * bx) / det;
        dx += ux;
        dy += uy;
        if (!std::isfinite(dx) || !std::isfinite(dy) || std::abs(dx) > src.width || std::abs(dy) > src.height) {
          diverged = true;
          break;
        }
        if (ux * ux + uy * uy < 1e-4) break;
      }
      if (diverged) break;
      if (level > 0) {
        dx *= 2;
        dy *= 2;
      }
    }

    Point2 out{p.x + dx, p.y + dy};
    const bool oob = out.x < -0.5 || out.y < -0.5 || out.x > width_ - 0.5 || out.y > height_ - 0.5;
    if (diverged || oob) {
      out.x = std::clamp(out.x, 0.0, width_ - 1.0);
      out.y = std::clamp(out.y, 0.0, height_ - 1.0);
      conf = 0;
    }
    result.points[i] = out;
    result.confidence[i] = conf;
  }
  return result;
}

}  // namespace pvx
