#pragma once

#include <memory>
#include <vector>

#include "pvx/geometry.hpp"
#include "pvx/image.hpp"
#include "pvx/synth_eval.hpp"

namespace pvx {

struct TrackerQuery {
  int source_frame = 0;
  int target_frame = 0;
  std::vector<Point2> points;
};

struct TrackerResult {
  std::vector<Point2> points;
  std::vector<double> confidence;  // in [0,1]
};

class Tracker {
 public:
  virtual ~Tracker() = default;
  virtual TrackerResult track(const TrackerQuery& query) const = 0;
  virtual int frame_count() const = 0;
};

// Evaluates a generated scene's analytic motion models exactly. Confidence
// is 1 where the point's layer is front-most (and in frame) at the target,
// 0 otherwise; positions always come from the motion model.
class OracleTracker : public Tracker {
 public:
  explicit OracleTracker(const GeneratedScene& scene) : scene_(&scene) {}
  TrackerResult track(const TrackerQuery& query) const override;
  int frame_count() const override { return scene_->frames.frame_count(); }

 private:
  const GeneratedScene* scene_;
};

struct LkParams {
  int levels = 3;
  int window = 15;  // odd
  int iterations = 10;
  double eig_ref = 0.01;  // confidence = min(1, lambda_min / eig_ref)
};

// Pyramidal Lucas-Kanade over grayscale pyramids of the video.
class LkTracker : public Tracker {
 public:
  LkTracker(const FrameSequence& video, LkParams params = {});
  TrackerResult track(const TrackerQuery& query) const override;
  int frame_count() const override { return static_cast<int>(pyramids_.size()); }

 private:
  std::vector<std::vector<ImageGray>> pyramids_;  // [frame][level]
  LkParams params_;
  int height_, width_;
};

}  // namespace pvx
