#pragma once

#include <string>

#include "pvx/appearance.hpp"
#include "pvx/propagation.hpp"
#include "pvx/tracking.hpp"
#include "pvx/vectorizer.hpp"

namespace pvx {

// One bundle for the whole pipeline. Desk-scale defaults; the paper-scale
// preset (c=128, hidden 256, 8 layers, 9 frequencies, 10000 steps) is
// selectable via `preset`.
struct PipelineConfig {
  VectorizerConfig vectorizer;
  PropagationConfig propagation;
  LkParams lk;
  DecoderConfig decoder;
  TrainConfig train;
  std::string tracker = "oracle";  // oracle | lk
  std::string ablation = "full";   // full | wo-pos | wo-U | wo-layer | F | FL
  int threads = 1;
  bool deterministic = false;
  bool spacing_explicit = false;  // vectorizer.spacing was set by the user

  // Applies derived defaults (spacing = eps_d / 2) and the ablation flags.
  void finalize();
};

void apply_paper_scale(PipelineConfig& config);

PipelineConfig load_config(const std::string& path);
PipelineConfig config_from_json_text(const std::string& text);
std::string config_to_json(const PipelineConfig& config);

}  // namespace pvx
