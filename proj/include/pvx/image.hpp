#pragma once

#include <cstdint>
#include <vector>

namespace pvx {

// Row-major h*w*3 raster, values in [0,1].
struct ImageRgb {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageRgb() = default;
  ImageRgb(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w * 3, 0.0) {}

  double& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  double at(int y, int x, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  bool in_bounds(int y, int x) const { return y >= 0 && y < height && x >= 0 && x < width; }
};

struct ImageGray {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageGray() = default;
  ImageGray(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w, 0.0) {}

  double& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
  bool in_bounds(int y, int x) const { return y >= 0 && y < height && x >= 0 && x < width; }
};

// Binary raster; nonzero means set.
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> data;

  Mask() = default;
  Mask(int h, int w, uint8_t fill = 0)
      : height(h), width(w), data(static_cast<size_t>(h) * w, fill) {}

  uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
  bool test(int y, int x) const { return data[static_cast<size_t>(y) * width + x] != 0; }
  bool in_bounds(int y, int x) const { return y >= 0 && y < height && x >= 0 && x < width; }
  size_t count() const;
  bool empty_mask() const { return count() == 0; }
};

struct FrameSequence {
  int height = 0;
  int width = 0;
  std::vector<ImageRgb> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
};

// Rec.601 luma weights: 0.299 R + 0.587 G + 0.114 B.
ImageGray luma(const ImageRgb& img);

}  // namespace pvx
