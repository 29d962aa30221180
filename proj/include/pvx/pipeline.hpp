#pragma once

#include <memory>

#include "pvx/config.hpp"
#include "pvx/representation.hpp"
#include "pvx/tracking.hpp"

namespace pvx {

struct BuiltLayers {
  std::vector<ProxyLayer> layers;
  std::vector<LayerDiagnostics> diagnostics;
  std::vector<LayerMaskTrack> masks;  // possibly merged for the wo-layer ablation
};

// Single full-frame background track (the wo-layer ablation's mask set).
std::vector<LayerMaskTrack> single_layer_masks(int height, int width, int n_frames);

// Seeds + schedule for every layer. Precomputed seeds (from `vectorize`)
// may be supplied; otherwise each layer is vectorized at its first frame.
BuiltLayers build_all_layers(const FrameSequence& video, const std::vector<LayerMaskTrack>& masks,
                             const Tracker& tracker, const PipelineConfig& config,
                             const std::vector<std::pair<int, SeedNodes>>* seeds = nullptr);

FitReport run_fit(const FrameSequence& video, const BuiltLayers& built, const PipelineConfig& config);

std::unique_ptr<Tracker> make_tracker(const PipelineConfig& config, const FrameSequence& video,
                                      const GeneratedScene* scene);

}  // namespace pvx
