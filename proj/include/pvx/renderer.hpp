#pragma once

#include <set>
#include <vector>

#include "pvx/representation.hpp"

namespace pvx {

// Reconstruction = composite with an empty drop set; both run the same
// per-pixel path: front-most included layer whose mask covers the pixel,
// background fallthrough, nearest-triangle extension outside a hull.
ImageRgb render_frame(const Representation& rep, int frame, const std::set<int>& drop_layers = {},
                      int threads = 1);

// Dense sub-pixel grid at `scale` (> 0); each output pixel decoded at its
// continuous source coordinate in the frame's triangulation.
ImageRgb render_superres(const Representation& rep, int frame, double scale,
                         const std::set<int>& drop_layers = {}, int threads = 1);

// Fractional-time rendering: node positions linearly interpolated between
// the neighboring integer frames, masks from the nearer one, triangulation
// recomputed at the interpolated positions.
ImageRgb render_time(const Representation& rep, double t_cont, const std::set<int>& drop_layers = {},
                     int threads = 1);

// 10*log10(1/MSE) on [0,1] data; identical rasters report 99 dB.
double psnr(const ImageRgb& a, const ImageRgb& b);
// Mean SSIM over valid 11x11 Gaussian windows (sigma 1.5), averaged over
// RGB channels.
double ssim(const ImageRgb& a, const ImageRgb& b);

}  // namespace pvx
