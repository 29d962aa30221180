#include "pvx/representation.hpp"

#include <cmath>
#include <sstream>

#include "pvx/error.hpp"

namespace pvx {

double quantize_f32(double v) { return static_cast<double>(static_cast<float>(v)); }

void quantize_representation(Representation& rep) {
  for (RepresentationLayer& layer : rep.layers) {
    for (double& v : layer.proxy.positions) v = quantize_f32(v);
    for (double& v : layer.proxy.confidence) v = quantize_f32(v);
    layer.codes.codes = layer.codes.codes.unaryExpr([](double v) { return quantize_f32(v); });
  }
  for (Eigen::MatrixXd& w : rep.decoder.weights) w = w.unaryExpr([](double v) { return quantize_f32(v); });
  for (Eigen::MatrixXd& b : rep.decoder.biases) b = b.unaryExpr([](double v) { return quantize_f32(v); });
}

ParamCount param_count(const Representation& rep) {
  ParamCount pc;
  for (const RepresentationLayer& layer : rep.layers) {
    pc.codes += static_cast<long long>(layer.codes.codes.rows()) * layer.codes.codes.cols();
    pc.trajectory += static_cast<long long>(layer.proxy.node_count()) * layer.proxy.n_local() * 2;
  }
  for (const Eigen::MatrixXd& w : rep.decoder.weights) pc.decoder += w.size();
  for (const Eigen::MatrixXd& b : rep.decoder.biases) pc.decoder += b.size();
  pc.total = pc.codes + pc.decoder;
  return pc;
}

std::vector<std::string> validate(const Representation& rep) {
  std::vector<std::string> violations;
  auto fail = [&](const std::string& s) { violations.push_back(s); };

  if (rep.layers.empty()) fail("no layers");
  if (rep.layers.size() != rep.mask_tracks.size()) fail("layer/mask track count mismatch");

  for (size_t i = 0; i < rep.layers.size(); ++i) {
    const ProxyLayer& p = rep.layers[i].proxy;
    const TextureCodes& c = rep.layers[i].codes;
    std::ostringstream tag;
    tag << "layer " << i << ": ";
    if (c.codes.rows() != p.node_count()) fail(tag.str() + "code row-count mismatch");
    if (!c.codes.allFinite()) fail(tag.str() + "non-finite code");
    for (double v : p.positions) {
      if (!std::isfinite(v)) {
        fail(tag.str() + "non-finite position");
        break;
      }
    }
    if (i == 0) {
      if (p.t_start != 0 || p.t_end != rep.meta.n_frames - 1) fail("layer 0 does not span all frames");
    }
    if (i < rep.mask_tracks.size()) {
      const LayerMaskTrack& track = rep.mask_tracks[i];
      if (track.t_start != p.t_start || track.t_end != p.t_end) fail(tag.str() + "mask track range mismatch");
      for (const Mask& m : track.masks) {
        if (m.height != rep.meta.height || m.width != rep.meta.width) {
          fail(tag.str() + "mask dimensions differ from meta");
          break;
        }
      }
      // Anchor positions must sit inside the layer mask at their source frame.
      for (int n = 0; n < p.node_count(); ++n) {
        const int sf = p.source_frame[n];
        if (sf < p.t_start || sf > p.t_end) {
          fail(tag.str() + "source frame out of range");
          break;
        }
        const Point2 pos = p.pos(n, sf);
        const int x = static_cast<int>(std::lround(pos.x));
        const int y = static_cast<int>(std::lround(pos.y));
        const Mask& m = track.mask_at(sf);
        if (!m.in_bounds(y, x) || !m.test(y, x)) {
          fail(tag.str() + "anchor position outside layer mask");
          break;
        }
      }
    }
    for (int tagv : p.round_tag) {
      if (tagv < 0) {
        fail(tag.str() + "negative round tag");
        break;
      }
    }
  }

  const int c_dim = rep.layers.empty() ? 0 : static_cast<int>(rep.layers[0].codes.codes.cols());
  const int expect_raw = c_dim + (rep.decoder.use_position ? 3 : 0);
  if (rep.decoder.raw_dim != expect_raw) fail("decoder raw input width inconsistent with code dimension");
  if (!rep.decoder.weights.empty()) {
    if (rep.decoder.weights.front().rows() != rep.decoder.encoded_dim())
      fail("decoder first-layer width inconsistent with frequency encoding");
    if (rep.decoder.weights.back().cols() != 3) fail("decoder output width is not 3");
    for (size_t l = 0; l + 1 < rep.decoder.weights.size(); ++l) {
      if (rep.decoder.weights[l].cols() != rep.decoder.weights[l + 1].rows()) {
        fail("decoder layer dimensions do not chain");
        break;
      }
    }
    for (size_t l = 0; l < rep.decoder.weights.size(); ++l) {
      if (rep.decoder.biases[l].cols() != rep.decoder.weights[l].cols()) {
        fail("decoder bias width mismatch");
        break;
      }
    }
  } else {
    fail("decoder has no layers");
  }
  return violations;
}

Representation assemble_representation(std::vector<ProxyLayer> layers, std::vector<LayerMaskTrack> masks,
                                       FitOutput fit, RepresentationMeta meta) {
  if (layers.size() != fit.codes.size()) throw InvalidInput("layer/codes count mismatch");
  Representation rep;
  for (size_t i = 0; i < layers.size(); ++i)
    rep.layers.push_back({std::move(layers[i]), std::move(fit.codes[i])});
  rep.mask_tracks = std::move(masks);
  rep.decoder = std::move(fit.decoder);
  rep.meta = std::move(meta);
  quantize_representation(rep);
  return rep;
}

FitReport fit_representation(const FrameSequence& video, const std::vector<LayerMaskTrack>& masks,
                             const std::vector<ProxyLayer>& layers, const DecoderConfig& decoder_config,
                             const TrainConfig& train_config, double eps_d, const std::string& config_json) {
  FitWorkspace workspace(video, masks, layers, train_config.threads);
  FitOutput fit = fit_appearance(workspace, decoder_config, train_config);
  RepresentationMeta meta;
  meta.height = video.height;
  meta.width = video.width;
  meta.n_frames = video.frame_count();
  meta.eps_d = eps_d;
  meta.config_json = config_json;
  FitReport report;
  report.loss_curve = fit.loss_curve;
  report.representation = assemble_representation(layers, masks, std::move(fit), std::move(meta));
  return report;
}

}  // namespace pvx
