#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "pvx/image.hpp"
#include "pvx/propagation.hpp"
#include "pvx/vectorizer.hpp"

namespace pvx {

// Per-node texture codes; one row per proxy node, constant across frames.
struct TextureCodes {
  Eigen::MatrixXd codes;  // g x c
  int code_dim() const { return static_cast<int>(codes.cols()); }
};

struct DecoderConfig {
  int code_dim = 32;
  int hidden = 128;
  int layers = 6;  // weight layers: input->h, (h->h)*, h->3
  int n_freq = 6;
  bool include_raw = true;
  bool use_position = true;  // feed (t, x, y) alongside the feature
};

struct DecoderParams {
  std::vector<Eigen::MatrixXd> weights;  // in x out
  std::vector<Eigen::MatrixXd> biases;   // 1 x out
  int raw_dim = 0;                       // decoder input width before encoding
  int n_freq = 6;
  bool include_raw = true;
  bool use_position = true;
  enum class Activation { kRelu };
  Activation activation = Activation::kRelu;

  int encoded_dim() const { return raw_dim * 2 * n_freq + (include_raw ? raw_dim : 0); }
  int layer_count() const { return static_cast<int>(weights.size()); }
};

struct TrainConfig {
  int steps = 3000;
  int batch_size = 4096;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 0;
  bool disable_position_input = false;
  bool disable_freq_encoding = false;
  bool disable_layering = false;
  int threads = 1;
};

// Componentwise [sin(2^0 pi u), cos(2^0 pi u), ..., sin(2^{n-1} pi u),
// cos(2^{n-1} pi u)], with the raw vector prepended when include_raw.
std::vector<double> freq_encode(const std::vector<double>& v, int n_freq, bool include_raw);

// Full decoder evaluation for one sample; t/x/y normalized to [-1, 1].
std::array<double, 3> decode(const Eigen::VectorXd& feature, double t_norm, double x_norm, double y_norm,
                             const DecoderParams& params);

DecoderParams init_decoder(const DecoderConfig& config, std::mt19937_64& rng);
TextureCodes init_codes(int node_count, int code_dim, std::mt19937_64& rng);

// Per-frame Delaunay triangulation over a layer's node positions with
// coincident nodes merged (lowest node index wins).
struct FrameTriangulation {
  Triangulation tri;
  std::vector<int> vertex_to_node;  // triangulation vertex -> node index
  bool degenerate = false;          // too few / collinear nodes this frame
  std::vector<Point2> fallback_points;  // deduped positions when degenerate

  // Resolves p to three node ids and weights (locate, falling back to the
  // nearest-triangle extension outside the hull).
  void sample(const Point2& p, int nodes[3], double lambda[3]) const;
};
FrameTriangulation build_frame_triangulation(const ProxyLayer& layer, int frame);
FrameTriangulation build_triangulation_from_positions(const std::vector<Point2>& positions);

// Batched encode + forward pass; rows of `raw` are decoder inputs before
// frequency encoding. Returns B x 3 sigmoid outputs.
Eigen::MatrixXd decode_batch(const Eigen::MatrixXd& raw, const DecoderParams& params, int threads = 1);

// f = sum_k lambda_k F[v_k] at the pixel's containing (or nearest) triangle.
Eigen::VectorXd interpolate_feature(const Point2& pixel, int frame, const ProxyLayer& layer,
                                    const TextureCodes& codes, const FrameTriangulation& tri);

struct Sample {
  int frame;
  int y;
  int x;
};

struct Gradients {
  std::vector<Eigen::MatrixXd> codes;   // per layer, g x c
  std::vector<Eigen::MatrixXd> weights;  // per decoder layer
  std::vector<Eigen::MatrixXd> biases;
};

struct FitState {
  std::vector<TextureCodes> codes;  // per layer
  DecoderParams decoder;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  long t = 0;
};

// Standard bias-corrected Adam over a flat list of tensors.
void adam_step(std::vector<Eigen::MatrixXd*>& params, const std::vector<const Eigen::MatrixXd*>& grads,
               AdamState& state, const TrainConfig& config);

// Precomputed per-pixel interpolation structure: owner layer, incident
// nodes, and barycentric weights for every (frame, pixel).
class FitWorkspace {
 public:
  FitWorkspace(const FrameSequence& video, const std::vector<LayerMaskTrack>& masks,
               const std::vector<ProxyLayer>& layers, int threads = 1);
  // The workspace keeps references; temporaries would dangle.
  FitWorkspace(const FrameSequence&, const std::vector<LayerMaskTrack>&, std::vector<ProxyLayer>&&,
               int = 1) = delete;
  FitWorkspace(FrameSequence&&, const std::vector<LayerMaskTrack>&, const std::vector<ProxyLayer>&,
               int = 1) = delete;

  int height() const { return height_; }
  int width() const { return width_; }
  int frame_count() const { return n_frames_; }
  long total_samples() const { return static_cast<long>(n_frames_) * height_ * width_; }
  int layer_count() const { return static_cast<int>(layers_->size()); }
  const std::vector<ProxyLayer>& layers() const { return *layers_; }
  const FrameSequence& video() const { return *video_; }

  Sample sample_at(long flat_index) const;
  int owner_layer(const Sample& s) const;
  void sample_geometry(const Sample& s, int nodes[3], double lambda[3]) const;

  // Mean over the batch of the squared RGB error; when `grads` is non-null
  // it receives d(loss)/d(codes) and d(loss)/d(decoder). Targets default to
  // the source video; `target_override` substitutes a different image for
  // frame `override_frame`.
  double loss_and_grads(const FitState& state, const std::vector<Sample>& batch, Gradients* grads,
                        const ImageRgb* target_override = nullptr, int override_frame = -1) const;

  void normalized_coords(const Sample& s, double* t_norm, double* x_norm, double* y_norm) const;

 private:
  struct Ref {
    int32_t layer;
    int32_t v[3];
    double lambda[3];
  };
  const FrameSequence* video_;
  const std::vector<LayerMaskTrack>* masks_;
  const std::vector<ProxyLayer>* layers_;
  std::vector<Ref> table_;
  int height_, width_, n_frames_;
  int threads_;
};

struct FitOutput {
  std::vector<TextureCodes> codes;
  DecoderParams decoder;
  std::vector<std::array<double, 3>> loss_curve;  // (step, loss, psnr estimate)
};

// Runs the optimization loop: uniform (pixel, frame) batches, MSE loss,
// Adam. Deterministic for a fixed seed in single-threaded mode.
FitOutput fit_appearance(const FitWorkspace& workspace, const DecoderConfig& decoder_config,
                         const TrainConfig& train_config);

double uniform_unit(std::mt19937_64& rng);            // [0, 1)
uint64_t uniform_below(std::mt19937_64& rng, uint64_t n);

}  // namespace pvx
