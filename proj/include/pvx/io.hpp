#pragma once

#include <array>
#include <string>
#include <vector>

#include "pvx/image.hpp"
#include "pvx/propagation.hpp"
#include "pvx/representation.hpp"
#include "pvx/synth_eval.hpp"
#include "pvx/vectorizer.hpp"

namespace pvx {

// --- PNG (8-bit) ---
ImageRgb read_png_rgb(const std::string& path);
Mask read_png_mask(const std::string& path);  // nonzero -> 1
void write_png_rgb(const std::string& path, const ImageRgb& img);
void write_png_mask(const std::string& path, const Mask& mask);

// --- PPM (binary P6), for bit-exact comparisons ---
void write_ppm(const std::string& path, const ImageRgb& img);
ImageRgb read_ppm(const std::string& path);

// --- Dataset layout: frame_%05d.png + layer_%02d/mask_%05d.png ---
void write_dataset(const std::string& dir, const FrameSequence& frames,
                   const std::vector<LayerMaskTrack>& layers);
FrameSequence read_frames(const std::string& dir);
// Reads layer_* mask directories; synthesizes the background complement
// when layer_00 is absent.
std::vector<LayerMaskTrack> read_mask_tracks(const std::string& dir, int n_frames, int height, int width);

// --- .pvm: run-length mask track ---
void save_pvm(const std::string& path, const LayerMaskTrack& track);
LayerMaskTrack load_pvm(const std::string& path);

// --- .pvt: trajectory exchange ---
// Spec layout (magic, layer_id, g, n_frames, t_start, f32 positions, f32
// confidences) followed by an optional provenance extension (u32 round
// tags, u32 source frames) that plain files may omit.
void save_pvt(const std::string& path, const ProxyLayer& layer);
ProxyLayer load_pvt(const std::string& path);

// --- .pvr: representation container ---
void save_pvr(const std::string& path, const Representation& rep);
Representation load_pvr(const std::string& path);

// --- diagnostics / curves ---
std::string diagnostics_json_line(int layer_id, const LayerDiagnostics& diag);
void write_diagnostics(const std::string& path, const std::vector<int>& layer_ids,
                       const std::vector<LayerDiagnostics>& diags);
void write_loss_curve_csv(const std::string& path, const std::vector<std::array<double, 3>>& curve);

// --- scene specs ---
std::string scene_spec_to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json_text(const std::string& text);
SceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const std::string& path, const SceneSpec& spec);

// --- seeds ---
void save_seeds_json(const std::string& path, const std::vector<std::pair<int, SeedNodes>>& seeds);
std::vector<std::pair<int, SeedNodes>> load_seeds_json(const std::string& path);

}  // namespace pvx
