#include "pvx/appearance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "pvx/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pvx {

double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Encodes one raw row into `out` (same layout as freq_encode). sin/cos at
// doubled frequencies come from the double-angle recurrence; forward and
// backward share the same computed values.
template <typename RawRow, typename OutRow>
void encode_row(const RawRow& raw, int d_raw, int n_freq, bool include_raw, OutRow&& out) {
  int col = 0;
  if (include_raw) {
    for (int j = 0; j < d_raw; ++j) out[col++] = raw[j];
  }
  for (int j = 0; j < d_raw; ++j) {
    double s = std::sin(kPi * raw[j]);
    double c = std::cos(kPi * raw[j]);
    for (int k = 0; k < n_freq; ++k) {
      out[col++] = s;
      out[col++] = c;
      const double s2 = 2.0 * s * c;
      const double c2 = c * c - s * s;
      s = s2;
      c = c2;
    }
  }
}

}  // namespace

std::vector<double> freq_encode(const std::vector<double>& v, int n_freq, bool include_raw) {
  for (double u : v)
    if (!std::isfinite(u)) throw InvalidInput("freq_encode: non-finite input");
  const int d = static_cast<int>(v.size());
  std::vector<double> out(static_cast<size_t>(d) * 2 * n_freq + (include_raw ? d : 0));
  encode_row(v, d, n_freq, include_raw, out);
  return out;
}

namespace {

Eigen::MatrixXd encode_batch(const Eigen::MatrixXd& raw, int n_freq, bool include_raw, int threads) {
  const int b = static_cast<int>(raw.rows());
  const int d = static_cast<int>(raw.cols());
  Eigen::MatrixXd out(b, d * 2 * n_freq + (include_raw ? d : 0));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1 && b > 256)
#endif
  for (int r = 0; r < b; ++r) encode_row(raw.row(r), d, n_freq, include_raw, out.row(r));
  return out;
}

struct ForwardCache {
  Eigen::MatrixXd enc;                // input to layer 0
  std::vector<Eigen::MatrixXd> acts;  // acts[l] = post-activation input to layer l+1
  Eigen::MatrixXd out;                // sigmoid output, B x 3
};

void mlp_forward(const DecoderParams& p, ForwardCache& cache) {
  const int n_layers = p.layer_count();
  cache.acts.resize(n_layers - 1);
  for (int l = 0; l < n_layers; ++l) {
    const Eigen::MatrixXd& in = l == 0 ? cache.enc : cache.acts[l - 1];
    Eigen::MatrixXd z = in * p.weights[l];
    z.rowwise() += p.biases[l].row(0);
    if (l + 1 < n_layers) {
      cache.acts[l] = z.cwiseMax(0.0);
    } else {
      cache.out = (1.0 + (-z.array()).exp()).inverse().matrix();
    }
  }
}

// dOut -> gradients; returns d(loss)/d(enc).
Eigen::MatrixXd mlp_backward(const Eigen::MatrixXd& d_out, const DecoderParams& p, const ForwardCache& cache,
                             std::vector<Eigen::MatrixXd>* d_weights, std::vector<Eigen::MatrixXd>* d_biases) {
  const int n_layers = p.layer_count();
  Eigen::MatrixXd dz = d_out.array() * cache.out.array() * (1.0 - cache.out.array());
  for (int l = n_layers - 1; l >= 0; --l) {
    const Eigen::MatrixXd& in = l == 0 ? cache.enc : cache.acts[l - 1];
    (*d_weights)[l].noalias() += in.transpose() * dz;
    (*d_biases)[l].row(0) += dz.colwise().sum();
    if (l == 0) return dz * p.weights[0].transpose();
    Eigen::MatrixXd da = dz * p.weights[l].transpose();
    dz = (cache.acts[l - 1].array() > 0.0).cast<double>() * da.array();
  }
  return {};
}

// d(loss)/d(enc) -> d(loss)/d(raw), reusing the encoded sin/cos values.
Eigen::MatrixXd encode_backward(const Eigen::MatrixXd& d_enc, const Eigen::MatrixXd& enc, int d_raw,
                                int n_freq, bool include_raw) {
  const int b = static_cast<int>(enc.rows());
  Eigen::MatrixXd d_raw_m = Eigen::MatrixXd::Zero(b, d_raw);
  int col = 0;
  if (include_raw) {
    d_raw_m = d_enc.leftCols(d_raw);
    col = d_raw;
  }
  for (int j = 0; j < d_raw; ++j) {
    for (int k = 0; k < n_freq; ++k) {
      const double omega = kPi * static_cast<double>(1 << k);
      d_raw_m.col(j).array() += omega * (enc.col(col + 1).array() * d_enc.col(col).array() -
                                         enc.col(col).array() * d_enc.col(col + 1).array());
      col += 2;
    }
  }
  return d_raw_m;
}

}  // namespace

std::array<double, 3> decode(const Eigen::VectorXd& feature, double t_norm, double x_norm, double y_norm,
                             const DecoderParams& params) {
  const int c = static_cast<int>(feature.size());
  Eigen::MatrixXd raw(1, params.raw_dim);
  for (int j = 0; j < c; ++j) raw(0, j) = feature(j);
  if (params.use_position) {
    raw(0, c) = t_norm;
    raw(0, c + 1) = x_norm;
    raw(0, c + 2) = y_norm;
  }
  ForwardCache cache;
  cache.enc = encode_batch(raw, params.n_freq, params.include_raw, 1);
  mlp_forward(params, cache);
  return {cache.out(0, 0), cache.out(0, 1), cache.out(0, 2)};
}

DecoderParams init_decoder(const DecoderConfig& config, std::mt19937_64& rng) {
  if (config.layers < 2) throw InvalidInput("decoder needs at least 2 layers");
  DecoderParams p;
  p.raw_dim = config.code_dim + (config.use_position ? 3 : 0);
  p.n_freq = config.n_freq;
  p.include_raw = config.include_raw;
  p.use_position = config.use_position;
  if (p.encoded_dim() <= 0) throw InvalidInput("decoder input width is zero");
  int in_dim = p.encoded_dim();
  for (int l = 0; l < config.layers; ++l) {
    const int out_dim = (l + 1 == config.layers) ? 3 : config.hidden;
    const double limit = std::sqrt(6.0 / in_dim);
    Eigen::MatrixXd w(in_dim, out_dim);
    for (int i = 0; i < in_dim; ++i)
      for (int j = 0; j < out_dim; ++j) w(i, j) = (2.0 * uniform_unit(rng) - 1.0) * limit;
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::MatrixXd::Zero(1, out_dim));
    in_dim = out_dim;
  }
  return p;
}

TextureCodes init_codes(int node_count, int code_dim, std::mt19937_64& rng) {
  TextureCodes codes;
  codes.codes.resize(node_count, code_dim);
  for (int i = 0; i < node_count; ++i)
    for (int j = 0; j < code_dim; ++j) codes.codes(i, j) = (2.0 * uniform_unit(rng) - 1.0) * 1e-2;
  return codes;
}

void FrameTriangulation::sample(const Point2& p, int nodes[3], double lambda[3]) const {
  if (degenerate) {
    // Nearest node carries the full weight.
    double best = std::numeric_limits<double>::infinity();
    int best_node = vertex_to_node.front();
    for (size_t i = 0; i < fallback_points.size(); ++i) {
      const double d2 = (fallback_points[i].x - p.x) * (fallback_points[i].x - p.x) +
                        (fallback_points[i].y - p.y) * (fallback_points[i].y - p.y);
      if (d2 < best) {
        best = d2;
        best_node = vertex_to_node[i];
      }
    }
    nodes[0] = nodes[1] = nodes[2] = best_node;
    lambda[0] = 1;
    lambda[1] = lambda[2] = 0;
    return;
  }
  BarycentricCoords bc = nearest_triangle_extension(p, tri);
  const Triangle& t = tri.triangles[bc.triangle_index];
  for (int k = 0; k < 3; ++k) nodes[k] = vertex_to_node[t.v[k]];
  lambda[0] = bc.lambda1;
  lambda[1] = bc.lambda2;
  lambda[2] = bc.lambda3;
}

FrameTriangulation build_triangulation_from_positions(const std::vector<Point2>& positions) {
  FrameTriangulation ft;
  // Merge coincident positions, keeping the lowest node index.
  std::vector<Point2> pts;
  std::map<std::pair<long long, long long>, int> seen;
  for (int n = 0; n < static_cast<int>(positions.size()); ++n) {
    const Point2 p = positions[n];
    const auto key = std::make_pair(static_cast<long long>(std::llround(p.x * 1e9)),
                                    static_cast<long long>(std::llround(p.y * 1e9)));
    if (seen.count(key)) continue;
    seen[key] = n;
    pts.push_back(p);
    ft.vertex_to_node.push_back(n);
  }
  try {
    ft.tri = delaunay(pts);
  } catch (const InvalidInput&) {
    ft.degenerate = true;
    ft.fallback_points = pts;
  }
  return ft;
}

FrameTriangulation build_frame_triangulation(const ProxyLayer& layer, int frame) {
  std::vector<Point2> pts(layer.node_count());
  for (int n = 0; n < layer.node_count(); ++n) pts[n] = layer.pos(n, frame);
  return build_triangulation_from_positions(pts);
}

Eigen::MatrixXd decode_batch(const Eigen::MatrixXd& raw, const DecoderParams& params, int threads) {
  Eigen::setNbThreads(std::max(1, threads));
  ForwardCache cache;
  cache.enc = encode_batch(raw, params.n_freq, params.include_raw, std::max(1, threads));
  mlp_forward(params, cache);
  return cache.out;
}

Eigen::VectorXd interpolate_feature(const Point2& pixel, int frame, const ProxyLayer& layer,
                                    const TextureCodes& codes, const FrameTriangulation& tri) {
  (void)layer;
  (void)frame;
  int nodes[3];
  double lambda[3];
  tri.sample(pixel, nodes, lambda);
  return lambda[0] * codes.codes.row(nodes[0]).transpose() +
         lambda[1] * codes.codes.row(nodes[1]).transpose() + lambda[2] * codes.codes.row(nodes[2]).transpose();
}

void adam_step(std::vector<Eigen::MatrixXd*>& params, const std::vector<const Eigen::MatrixXd*>& grads,
               AdamState& state, const TrainConfig& config) {
  if (params.size() != grads.size()) throw InvalidInput("adam_step: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const Eigen::MatrixXd* p : params) {
      state.m.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      state.v.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * (*grads[i]);
    state.v[i] = config.beta2 * state.v[i].array().matrix() +
                 (1.0 - config.beta2) * grads[i]->array().square().matrix();
    params[i]->array() -= config.learning_rate * (state.m[i].array() / bc1) /
                          ((state.v[i].array() / bc2).sqrt() + config.adam_eps);
  }
}

FitWorkspace::FitWorkspace(const FrameSequence& video, const std::vector<LayerMaskTrack>& masks,
                           const std::vector<ProxyLayer>& layers, int threads)
    : video_(&video), masks_(&masks), layers_(&layers), threads_(std::max(1, threads)) {
  height_ = video.height;
  width_ = video.width;
  n_frames_ = video.frame_count();
  if (masks.empty() || masks[0].layer_id != 0) throw InvalidInput("layer 0 (background) track required");
  if (masks.size() != layers.size()) throw InvalidInput("mask track / proxy layer count mismatch");

  table_.resize(static_cast<size_t>(n_frames_) * height_ * width_);
  for (int t = 0; t < n_frames_; ++t) {
    // Front-most owner per pixel.
    std::vector<int32_t> owner(static_cast<size_t>(height_) * width_, 0);
    for (int li = 1; li < static_cast<int>(masks.size()); ++li) {
      if (!masks[li].alive_at(t)) continue;
      const Mask& m = masks[li].mask_at(t);
      for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
          if (m.test(y, x)) owner[static_cast<size_t>(y) * width_ + x] = li;
    }
    std::vector<FrameTriangulation> tris(masks.size());
    std::vector<char> built(masks.size(), 0);
    auto tri_for = [&](int li) -> FrameTriangulation& {
      if (!built[li]) {
        tris[li] = build_frame_triangulation((*layers_)[li], t);
        built[li] = 1;
      }
      return tris[li];
    };
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const int li = owner[static_cast<size_t>(y) * width_ + x];
        Ref& ref = table_[(static_cast<size_t>(t) * height_ + y) * width_ + x];
        ref.layer = li;
        int nodes[3];
        double lambda[3];
        tri_for(li).sample({static_cast<double>(x), static_cast<double>(y)}, nodes, lambda);
        for (int k = 0; k < 3; ++k) {
          ref.v[k] = nodes[k];
          ref.lambda[k] = lambda[k];
        }
      }
    }
  }
}

Sample FitWorkspace::sample_at(long flat_index) const {
  const long per_frame = static_cast<long>(height_) * width_;
  Sample s;
  s.frame = static_cast<int>(flat_index / per_frame);
  const long r = flat_index % per_frame;
  s.y = static_cast<int>(r / width_);
  s.x = static_cast<int>(r % width_);
  return s;
}

int FitWorkspace::owner_layer(const Sample& s) const {
  return table_[(static_cast<size_t>(s.frame) * height_ + s.y) * width_ + s.x].layer;
}

void FitWorkspace::sample_geometry(const Sample& s, int nodes[3], double lambda[3]) const {
  const Ref& ref = table_[(static_cast<size_t>(s.frame) * height_ + s.y) * width_ + s.x];
  for (int k = 0; k < 3; ++k) {
    nodes[k] = ref.v[k];
    lambda[k] = ref.lambda[k];
  }
}

void FitWorkspace::normalized_coords(const Sample& s, double* t_norm, double* x_norm, double* y_norm) const {
  *t_norm = n_frames_ > 1 ? 2.0 * s.frame / (n_frames_ - 1) - 1.0 : 0.0;
  *x_norm = 2.0 * s.x / width_ - 1.0;
  *y_norm = 2.0 * s.y / height_ - 1.0;
}

double FitWorkspace::loss_and_grads(const FitState& state, const std::vector<Sample>& batch, Gradients* grads,
                                    const ImageRgb* target_override, int override_frame) const {
  const int b = static_cast<int>(batch.size());
  if (b == 0) throw InvalidInput("empty batch");
  const DecoderParams& dec = state.decoder;
  const int c = static_cast<int>(state.codes.front().codes.cols());

  Eigen::MatrixXd raw(b, dec.raw_dim);
  Eigen::MatrixXd target(b, 3);
  for (int i = 0; i < b; ++i) {
    const Sample& s = batch[i];
    const Ref& ref = table_[(static_cast<size_t>(s.frame) * height_ + s.y) * width_ + s.x];
    const Eigen::MatrixXd& codes = state.codes[ref.layer].codes;
    raw.block(i, 0, 1, c) = ref.lambda[0] * codes.row(ref.v[0]) + ref.lambda[1] * codes.row(ref.v[1]) +
                            ref.lambda[2] * codes.row(ref.v[2]);
    if (dec.use_position) {
      double tn, xn, yn;
      normalized_coords(s, &tn, &xn, &yn);
      raw(i, c) = tn;
      raw(i, c + 1) = xn;
      raw(i, c + 2) = yn;
    }
    const ImageRgb& img = (target_override && s.frame == override_frame) ? *target_override
                                                                         : video_->frames[s.frame];
    for (int ch = 0; ch < 3; ++ch) target(i, ch) = img.at(s.y, s.x, ch);
  }

  ForwardCache cache;
  cache.enc = encode_batch(raw, dec.n_freq, dec.include_raw, threads_);
  mlp_forward(dec, cache);

  const Eigen::MatrixXd err = cache.out - target;
  const double loss = err.array().square().sum() / b;
  if (!grads) return loss;

  // Reuse gradient buffers across steps when shapes already match.
  const bool shapes_match =
      grads->codes.size() == state.codes.size() && grads->weights.size() == dec.weights.size() &&
      !grads->codes.empty() && grads->codes.front().rows() == state.codes.front().codes.rows() &&
      grads->codes.front().cols() == state.codes.front().codes.cols() &&
      grads->weights.front().rows() == dec.weights.front().rows();
  if (shapes_match) {
    for (Eigen::MatrixXd& g : grads->codes) g.setZero();
    for (Eigen::MatrixXd& g : grads->weights) g.setZero();
    for (Eigen::MatrixXd& g : grads->biases) g.setZero();
  } else {
    grads->codes.clear();
    for (const TextureCodes& tc : state.codes)
      grads->codes.push_back(Eigen::MatrixXd::Zero(tc.codes.rows(), tc.codes.cols()));
    grads->weights.clear();
    grads->biases.clear();
    for (int l = 0; l < dec.layer_count(); ++l) {
      grads->weights.push_back(Eigen::MatrixXd::Zero(dec.weights[l].rows(), dec.weights[l].cols()));
      grads->biases.push_back(Eigen::MatrixXd::Zero(1, dec.biases[l].cols()));
    }
  }

  const Eigen::MatrixXd d_out = (2.0 / b) * err;
  const Eigen::MatrixXd d_enc = mlp_backward(d_out, dec, cache, &grads->weights, &grads->biases);
  const Eigen::MatrixXd d_raw = encode_backward(d_enc, cache.enc, dec.raw_dim, dec.n_freq, dec.include_raw);

  for (int i = 0; i < b; ++i) {
    const Sample& s = batch[i];
    const Ref& ref = table_[(static_cast<size_t>(s.frame) * height_ + s.y) * width_ + s.x];
    Eigen::MatrixXd& g = grads->codes[ref.layer];
    for (int k = 0; k < 3; ++k) g.row(ref.v[k]) += ref.lambda[k] * d_raw.block(i, 0, 1, c);
  }
  return loss;
}

FitOutput fit_appearance(const FitWorkspace& workspace, const DecoderConfig& decoder_config,
                         const TrainConfig& train_config) {
  DecoderConfig dc = decoder_config;
  if (train_config.disable_position_input) dc.use_position = false;
  if (train_config.disable_freq_encoding) {
    dc.n_freq = 0;
    dc.include_raw = true;
  }

#ifdef _OPENMP
  omp_set_num_threads(std::max(1, train_config.threads));
#endif
  Eigen::setNbThreads(std::max(1, train_config.threads));

  std::mt19937_64 rng(train_config.seed);
  FitOutput out;
  for (int li = 0; li < workspace.layer_count(); ++li)
    out.codes.push_back(init_codes(workspace.layers()[li].node_count(), dc.code_dim, rng));
  out.decoder = init_decoder(dc, rng);

  FitState state{out.codes, out.decoder};
  std::vector<Eigen::MatrixXd*> params;
  for (TextureCodes& tc : state.codes) params.push_back(&tc.codes);
  for (Eigen::MatrixXd& w : state.decoder.weights) params.push_back(&w);
  for (Eigen::MatrixXd& bmat : state.decoder.biases) params.push_back(&bmat);

  AdamState adam;
  Gradients grads;
  const long total = workspace.total_samples();
  std::vector<Sample> batch(train_config.batch_size);
  out.loss_curve.reserve(train_config.steps);

  for (int step = 0; step < train_config.steps; ++step) {
    for (int i = 0; i < train_config.batch_size; ++i)
      batch[i] = workspace.sample_at(static_cast<long>(uniform_below(rng, total)));
    const double loss = workspace.loss_and_grads(state, batch, &grads);
    if (!std::isfinite(loss)) {
      std::ostringstream msg;
      msg << "non-finite loss at step " << step << " (first sample frame=" << batch[0].frame
          << " y=" << batch[0].y << " x=" << batch[0].x << ")";
      throw std::runtime_error(msg.str());
    }
    std::vector<const Eigen::MatrixXd*> grad_ptrs;
    for (const Eigen::MatrixXd& g : grads.codes) grad_ptrs.push_back(&g);
    for (const Eigen::MatrixXd& g : grads.weights) grad_ptrs.push_back(&g);
    for (const Eigen::MatrixXd& g : grads.biases) grad_ptrs.push_back(&g);
    adam_step(params, grad_ptrs, adam, train_config);
    const double psnr_est = 10.0 * std::log10(1.0 / std::max(loss / 3.0, 1e-12));
    out.loss_curve.push_back({static_cast<double>(step), loss, psnr_est});
  }

  out.codes = std::move(state.codes);
  out.decoder = std::move(state.decoder);
  return out;
}

}  // namespace pvx
