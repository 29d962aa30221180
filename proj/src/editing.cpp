#include "pvx/editing.hpp"

#include <random>

#include "pvx/error.hpp"

namespace pvx {

std::vector<ImageRgb> inpaint(const Representation& rep, const std::set<int>& drop_layers, int threads) {
  if (drop_layers.count(0)) throw InvalidInput("cannot drop layer 0 (background)");
  std::vector<ImageRgb> out;
  out.reserve(rep.meta.n_frames);
  for (int t = 0; t < rep.meta.n_frames; ++t) out.push_back(render_frame(rep, t, drop_layers, threads));
  return out;
}

Representation edit_keyframe(const Representation& rep, int frame, const ImageRgb& edited_image,
                             const Mask& region_mask, const EditOptions& opts) {
  if (frame < 0 || frame >= rep.meta.n_frames) throw InvalidInput("edit_keyframe: frame out of range");
  if (edited_image.height != rep.meta.height || edited_image.width != rep.meta.width)
    throw InvalidInput("edit_keyframe: edited image dimensions differ from video");
  if (region_mask.height != rep.meta.height || region_mask.width != rep.meta.width)
    throw InvalidInput("edit_keyframe: region mask dimensions differ from video");
  if (region_mask.count() == 0) throw InvalidInput("edit_keyframe: empty region mask");

  std::vector<ProxyLayer> layers;
  for (const RepresentationLayer& l : rep.layers) layers.push_back(l.proxy);

  // The workspace only reads targets through the edited-image override, so a
  // zero video of the right shape suffices.
  FrameSequence zero;
  zero.height = rep.meta.height;
  zero.width = rep.meta.width;
  zero.frames.assign(rep.meta.n_frames, ImageRgb(rep.meta.height, rep.meta.width));
  FitWorkspace workspace(zero, rep.mask_tracks, layers, opts.threads);

  std::vector<Sample> region_samples;
  for (int y = 0; y < region_mask.height; ++y)
    for (int x = 0; x < region_mask.width; ++x)
      if (region_mask.data[static_cast<size_t>(y) * region_mask.width + x]) region_samples.push_back({frame, y, x});

  FitState state;
  for (const RepresentationLayer& l : rep.layers) state.codes.push_back(l.codes);
  state.decoder = rep.decoder;

  // Only code matrices are trainable; rows untouched by region samples get
  // zero gradients and therefore never move.
  std::vector<Eigen::MatrixXd*> params;
  for (TextureCodes& tc : state.codes) params.push_back(&tc.codes);

  TrainConfig tcfg;
  tcfg.learning_rate = opts.learning_rate;
  tcfg.threads = opts.threads;
  AdamState adam;
  Gradients grads;
  std::mt19937_64 rng(opts.seed);

  std::vector<Sample> batch;
  for (int step = 0; step < opts.steps; ++step) {
    if (static_cast<int>(region_samples.size()) <= opts.max_batch) {
      batch = region_samples;
    } else {
      batch.resize(opts.max_batch);
      for (int i = 0; i < opts.max_batch; ++i)
        batch[i] = region_samples[uniform_below(rng, region_samples.size())];
    }
    workspace.loss_and_grads(state, batch, &grads, &edited_image, frame);
    std::vector<const Eigen::MatrixXd*> grad_ptrs;
    for (const Eigen::MatrixXd& g : grads.codes) grad_ptrs.push_back(&g);
    adam_step(params, grad_ptrs, adam, tcfg);
  }

  Representation out = rep;
  for (size_t i = 0; i < out.layers.size(); ++i) {
    out.layers[i].codes.codes = state.codes[i].codes.unaryExpr([](double v) { return quantize_f32(v); });
  }
  return out;
}

}  // namespace pvx
