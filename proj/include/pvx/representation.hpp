#pragma once

#include <string>
#include <vector>

#include "pvx/appearance.hpp"
#include "pvx/propagation.hpp"
#include "pvx/vectorizer.hpp"

namespace pvx {

struct RepresentationMeta {
  int height = 0;
  int width = 0;
  int n_frames = 0;
  double eps_d = 30.0;
  uint32_t version = 1;
  std::string config_json;  // config snapshot
};

struct RepresentationLayer {
  ProxyLayer proxy;
  TextureCodes codes;
};

// The serializable artifact: ordered layers (0 = background), the shared
// decoder, per-layer mask tracks, and metadata. All float data is quantized
// through float32 so disk round-trips reproduce renders bit-exactly.
struct Representation {
  std::vector<RepresentationLayer> layers;
  std::vector<LayerMaskTrack> mask_tracks;  // aligned with layers
  DecoderParams decoder;
  RepresentationMeta meta;
};

struct ParamCount {
  long long codes = 0;
  long long decoder = 0;
  long long total = 0;       // codes + decoder (the optimized parameters)
  long long trajectory = 0;  // position storage, reported separately
};

ParamCount param_count(const Representation& rep);

// Checks every container invariant; returns all violations (empty = ok).
std::vector<std::string> validate(const Representation& rep);

double quantize_f32(double v);
void quantize_representation(Representation& rep);

Representation assemble_representation(std::vector<ProxyLayer> layers, std::vector<LayerMaskTrack> masks,
                                       FitOutput fit, RepresentationMeta meta);

struct FitReport {
  Representation representation;
  std::vector<std::array<double, 3>> loss_curve;
};

// Convenience pipeline: workspace construction, optimization, assembly.
FitReport fit_representation(const FrameSequence& video, const std::vector<LayerMaskTrack>& masks,
                             const std::vector<ProxyLayer>& layers, const DecoderConfig& decoder_config,
                             const TrainConfig& train_config, double eps_d, const std::string& config_json = "{}");

}  // namespace pvx
