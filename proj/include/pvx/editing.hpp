#pragma once

#include <set>
#include <vector>

#include "pvx/renderer.hpp"
#include "pvx/representation.hpp"

namespace pvx {

// Layer-drop inpainting: composite rendering with the dropped layers
// excluded, for every frame. Layer 0 cannot be dropped.
std::vector<ImageRgb> inpaint(const Representation& rep, const std::set<int>& drop_layers, int threads = 1);

struct EditOptions {
  int steps = 500;
  double learning_rate = 5e-3;
  int max_batch = 16384;
  uint64_t seed = 0;
  int threads = 1;
};

// Re-optimizes the texture codes supporting `region_mask` at `frame` so the
// render there matches `edited_image`, with the decoder and all other codes
// frozen. Returns a new representation; the input is untouched.
Representation edit_keyframe(const Representation& rep, int frame, const ImageRgb& edited_image,
                             const Mask& region_mask, const EditOptions& opts = {});

}  // namespace pvx
