#include "pvx/pipeline.hpp"

#include "pvx/error.hpp"

namespace pvx {

std::vector<LayerMaskTrack> single_layer_masks(int height, int width, int n_frames) {
  LayerMaskTrack track;
  track.layer_id = 0;
  track.t_start = 0;
  track.t_end = n_frames - 1;
  track.masks.assign(n_frames, Mask(height, width, 1));
  return {std::move(track)};
}

BuiltLayers build_all_layers(const FrameSequence& video, const std::vector<LayerMaskTrack>& masks,
                             const Tracker& tracker, const PipelineConfig& config,
                             const std::vector<std::pair<int, SeedNodes>>* seeds) {
  BuiltLayers out;
  out.masks = config.train.disable_layering ? single_layer_masks(video.height, video.width, video.frame_count())
                                            : masks;
  for (const LayerMaskTrack& track : out.masks) {
    SeedNodes layer_seeds;
    bool found = false;
    if (seeds) {
      for (const auto& [id, s] : *seeds) {
        if (id == track.layer_id) {
          layer_seeds = s;
          found = true;
          break;
        }
      }
      if (!found) throw InvalidInput("no seeds for layer " + std::to_string(track.layer_id));
    } else {
      layer_seeds = vectorize_layer(video.frames[track.t_start], track.mask_at(track.t_start), track.t_start,
                                    config.vectorizer);
    }
    LayerDiagnostics diag;
    out.layers.push_back(build_layer(layer_seeds, tracker, track, config.propagation, &diag));
    out.diagnostics.push_back(std::move(diag));
  }
  return out;
}

FitReport run_fit(const FrameSequence& video, const BuiltLayers& built, const PipelineConfig& config) {
  return fit_representation(video, built.masks, built.layers, config.decoder, config.train,
                            config.propagation.eps_d, config_to_json(config));
}

std::unique_ptr<Tracker> make_tracker(const PipelineConfig& config, const FrameSequence& video,
                                      const GeneratedScene* scene) {
  if (config.tracker == "lk") return std::make_unique<LkTracker>(video, config.lk);
  if (config.tracker == "oracle") {
    if (!scene) throw InvalidInput("oracle tracker needs a generated scene (scene spec)");
    return std::make_unique<OracleTracker>(*scene);
  }
  throw InvalidInput("unknown tracker: " + config.tracker);
}

}  // namespace pvx
