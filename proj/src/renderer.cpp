#include "pvx/renderer.hpp"

#include <algorithm>
#include <cmath>

#include "pvx/error.hpp"

namespace pvx {

namespace {

struct PixelJob {
  double src_x, src_y;  // continuous source coordinate for geometry/decode
  int out_y, out_x;
};

// Shared per-pixel decode path for all render modes. Owner resolution uses
// the mask at `mask_frame`; geometry uses `positions` per layer; t_norm is
// continuous.
ImageRgb render_internal(const Representation& rep, double t_cont, int mask_frame,
                         const std::vector<std::vector<Point2>>& positions, const std::set<int>& drop_layers,
                         int out_h, int out_w, double scale, int threads) {
  const int n_layers = static_cast<int>(rep.layers.size());
  const int h = rep.meta.height, w = rep.meta.width;
  if (drop_layers.count(0)) throw InvalidInput("cannot drop layer 0 (background)");

  // Front-most included owner per output pixel, from masks at mask_frame.
  std::vector<int> owner(static_cast<size_t>(out_h) * out_w, 0);
  for (int li = 1; li < n_layers; ++li) {
    if (drop_layers.count(rep.layers[li].proxy.layer_id)) continue;
    if (positions[li].empty()) continue;  // layer not alive at this time
    const LayerMaskTrack& track = rep.mask_tracks[li];
    if (!track.alive_at(mask_frame)) continue;
    const Mask& m = track.mask_at(mask_frame);
    for (int y = 0; y < out_h; ++y) {
      const int sy = std::clamp(static_cast<int>(std::lround((y + 0.5) / scale - 0.5)), 0, h - 1);
      for (int x = 0; x < out_w; ++x) {
        const int sx = std::clamp(static_cast<int>(std::lround((x + 0.5) / scale - 0.5)), 0, w - 1);
        if (m.test(sy, sx)) owner[static_cast<size_t>(y) * out_w + x] = li;
      }
    }
  }

  // Geometry per included layer, built lazily.
  std::vector<FrameTriangulation> tris(n_layers);
  std::vector<char> built(n_layers, 0);
  auto tri_for = [&](int li) -> const FrameTriangulation& {
    if (!built[li]) {
      tris[li] = build_triangulation_from_positions(positions[li]);
      built[li] = 1;
    }
    return tris[li];
  };

  const int n_frames = rep.meta.n_frames;
  const double t_norm = n_frames > 1 ? 2.0 * t_cont / (n_frames - 1) - 1.0 : 0.0;
  const int c = static_cast<int>(rep.layers[0].codes.codes.cols());

  ImageRgb out(out_h, out_w);
  for (int li = 0; li < n_layers; ++li) {
    std::vector<PixelJob> jobs;
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x)
        if (owner[static_cast<size_t>(y) * out_w + x] == li)
          jobs.push_back({(x + 0.5) / scale - 0.5, (y + 0.5) / scale - 0.5, y, x});
    if (jobs.empty()) continue;

    const FrameTriangulation& tri = tri_for(li);
    const Eigen::MatrixXd& codes = rep.layers[li].codes.codes;
    Eigen::MatrixXd raw(static_cast<int>(jobs.size()), rep.decoder.raw_dim);
    for (size_t j = 0; j < jobs.size(); ++j) {
      int nodes[3];
      double lambda[3];
      tri.sample({jobs[j].src_x, jobs[j].src_y}, nodes, lambda);
      raw.block(static_cast<int>(j), 0, 1, c) = lambda[0] * codes.row(nodes[0]) +
                                                lambda[1] * codes.row(nodes[1]) +
                                                lambda[2] * codes.row(nodes[2]);
      if (rep.decoder.use_position) {
        raw(static_cast<int>(j), c) = t_norm;
        raw(static_cast<int>(j), c + 1) = 2.0 * jobs[j].src_x / w - 1.0;
        raw(static_cast<int>(j), c + 2) = 2.0 * jobs[j].src_y / h - 1.0;
      }
    }
    const Eigen::MatrixXd rgb = decode_batch(raw, rep.decoder, threads);
    for (size_t j = 0; j < jobs.size(); ++j)
      for (int ch = 0; ch < 3; ++ch) out.at(jobs[j].out_y, jobs[j].out_x, ch) = rgb(static_cast<int>(j), ch);
  }
  return out;
}

std::vector<std::vector<Point2>> positions_at_time(const Representation& rep, double t_cont) {
  const int t0 = static_cast<int>(std::floor(t_cont));
  const int t1 = static_cast<int>(std::ceil(t_cont));
  const double alpha = t_cont - t0;
  std::vector<std::vector<Point2>> out(rep.layers.size());
  for (size_t li = 0; li < rep.layers.size(); ++li) {
    const ProxyLayer& p = rep.layers[li].proxy;
    if (t0 < p.t_start || t1 > p.t_end) continue;  // not alive; stays empty
    out[li].resize(p.node_count());
    for (int n = 0; n < p.node_count(); ++n) {
      const Point2 a = p.pos(n, t0);
      const Point2 b = p.pos(n, t1);
      out[li][n] = {(1.0 - alpha) * a.x + alpha * b.x, (1.0 - alpha) * a.y + alpha * b.y};
    }
  }
  return out;
}

}  // namespace

ImageRgb render_frame(const Representation& rep, int frame, const std::set<int>& drop_layers, int threads) {
  if (frame < 0 || frame >= rep.meta.n_frames) throw InvalidInput("render_frame: frame out of range");
  return render_internal(rep, frame, frame, positions_at_time(rep, frame), drop_layers, rep.meta.height,
                         rep.meta.width, 1.0, threads);
}

ImageRgb render_superres(const Representation& rep, int frame, double scale, const std::set<int>& drop_layers,
                         int threads) {
  if (frame < 0 || frame >= rep.meta.n_frames) throw InvalidInput("render_superres: frame out of range");
  if (scale <= 0) throw InvalidInput("render_superres: scale must be positive");
  const int out_h = static_cast<int>(std::ceil(scale * rep.meta.height));
  const int out_w = static_cast<int>(std::ceil(scale * rep.meta.width));
  return render_internal(rep, frame, frame, positions_at_time(rep, frame), drop_layers, out_h, out_w, scale,
                         threads);
}

ImageRgb render_time(const Representation& rep, double t_cont, const std::set<int>& drop_layers, int threads) {
  if (t_cont < 0 || t_cont > rep.meta.n_frames - 1) throw InvalidInput("render_time: time out of range");
  const int mask_frame = static_cast<int>(std::llround(t_cont));
  return render_internal(rep, t_cont, mask_frame, positions_at_time(rep, t_cont), drop_layers,
                         rep.meta.height, rep.meta.width, 1.0, threads);
}

double psnr(const ImageRgb& a, const ImageRgb& b) {
  if (a.height != b.height || a.width != b.width) throw InvalidInput("psnr: dimension mismatch");
  double sum = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sum += d * d;
  }
  const double mse = sum / a.data.size();
  if (mse <= 0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

namespace {

// Separable Gaussian filtering with valid-window semantics.
std::vector<double> gaussian_valid(const std::vector<double>& img, int h, int w, const std::vector<double>& k) {
  const int r = static_cast<int>(k.size()) / 2;
  const int vh = h - 2 * r, vw = w - 2 * r;
  std::vector<double> tmp(static_cast<size_t>(h) * vw, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < vw; ++x) {
      double s = 0;
      for (int i = 0; i < static_cast<int>(k.size()); ++i) s += k[i] * img[static_cast<size_t>(y) * w + x + i];
      tmp[static_cast<size_t>(y) * vw + x] = s;
    }
  std::vector<double> out(static_cast<size_t>(vh) * vw, 0.0);
  for (int y = 0; y < vh; ++y)
    for (int x = 0; x < vw; ++x) {
      double s = 0;
      for (int i = 0; i < static_cast<int>(k.size()); ++i) s += k[i] * tmp[static_cast<size_t>(y + i) * vw + x];
      out[static_cast<size_t>(y) * vw + x] = s;
    }
  return out;
}

}  // namespace

double ssim(const ImageRgb& a, const ImageRgb& b) {
  if (a.height != b.height || a.width != b.width) throw InvalidInput("ssim: dimension mismatch");
  const int h = a.height, w = a.width;
  const int win = std::min({11, h, w});
  const int r = win / 2;
  std::vector<double> kernel(win);
  double ksum = 0;
  for (int i = 0; i < win; ++i) {
    const double d = i - r;
    kernel[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    ksum += kernel[i];
  }
  for (double& v : kernel) v /= ksum;

  const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double total = 0;
  for (int ch = 0; ch < 3; ++ch) {
    std::vector<double> xa(static_cast<size_t>(h) * w), xb(xa.size()), xaa(xa.size()), xbb(xa.size()),
        xab(xa.size());
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double va = a.at(y, x, ch), vb = b.at(y, x, ch);
        const size_t i = static_cast<size_t>(y) * w + x;
        xa[i] = va;
        xb[i] = vb;
        xaa[i] = va * va;
        xbb[i] = vb * vb;
        xab[i] = va * vb;
      }
    const auto mu_a = gaussian_valid(xa, h, w, kernel);
    const auto mu_b = gaussian_valid(xb, h, w, kernel);
    const auto m_aa = gaussian_valid(xaa, h, w, kernel);
    const auto m_bb = gaussian_valid(xbb, h, w, kernel);
    const auto m_ab = gaussian_valid(xab, h, w, kernel);
    double s = 0;
    for (size_t i = 0; i < mu_a.size(); ++i) {
      const double va = m_aa[i] - mu_a[i] * mu_a[i];
      const double vb = m_bb[i] - mu_b[i] * mu_b[i];
      const double cov = m_ab[i] - mu_a[i] * mu_b[i];
      s += ((2 * mu_a[i] * mu_b[i] + c1) * (2 * cov + c2)) /
           ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
    }
    total += s / mu_a.size();
  }
  return total / 3.0;
}

}  // namespace pvx
