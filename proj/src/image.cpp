#include "pvx/image.hpp"

#include <algorithm>

namespace pvx {

size_t Mask::count() const {
  return static_cast<size_t>(std::count_if(data.begin(), data.end(), [](uint8_t v) { return v != 0; }));
}

ImageGray luma(const ImageRgb& img) {
  ImageGray out(img.height, img.width);
  const size_t n = static_cast<size_t>(img.height) * img.width;
  for (size_t i = 0; i < n; ++i) {
    out.data[i] = 0.299 * img.data[i * 3] + 0.587 * img.data[i * 3 + 1] + 0.114 * img.data[i * 3 + 2];
  }
  return out;
}

}  // namespace pvx
