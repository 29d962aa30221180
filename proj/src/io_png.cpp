#include <png.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "pvx/error.hpp"
#include "pvx/io.hpp"

namespace pvx {

namespace {

struct FileCloser {
  FILE* f;
  ~FileCloser() {
    if (f) fclose(f);
  }
};

std::vector<std::vector<uint8_t>> read_png_rows(const std::string& path, int* width, int* height,
                                                int* channels) {
  FILE* f = fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open PNG file: " + path);
  FileCloser closer{f};

  png_byte header[8];
  if (fread(header, 1, 8, f) != 8 || png_sig_cmp(header, 0, 8))
    throw IoError("not a PNG file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) throw IoError("libpng initialization failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("corrupt PNG file: " + path);
  }
  png_init_io(png, f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_packing(png);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  *width = static_cast<int>(png_get_image_width(png, info));
  *height = static_cast<int>(png_get_image_height(png, info));
  *channels = static_cast<int>(png_get_channels(png, info));

  std::vector<std::vector<uint8_t>> rows(*height, std::vector<uint8_t>(png_get_rowbytes(png, info)));
  std::vector<png_bytep> ptrs(*height);
  for (int y = 0; y < *height; ++y) ptrs[y] = rows[y].data();
  png_read_image(png, ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return rows;
}

void write_png_bytes(const std::string& path, const std::vector<uint8_t>& bytes, int width, int height,
                     int channels) {
  FILE* f = fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot create PNG file: " + path);
  FileCloser closer{f};

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (!png || !info) throw IoError("libpng initialization failed");
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed: " + path);
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, width, height, 8,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> ptrs(height);
  for (int y = 0; y < height; ++y)
    ptrs[y] = const_cast<png_bytep>(bytes.data() + static_cast<size_t>(y) * width * channels);
  png_write_image(png, ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

uint8_t to_u8(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

ImageRgb read_png_rgb(const std::string& path) {
  int w, h, ch;
  const auto rows = read_png_rows(path, &w, &h, &ch);
  ImageRgb img(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c)
        img.at(y, x, c) = rows[y][static_cast<size_t>(x) * ch + (ch >= 3 ? c : 0)] / 255.0;
  return img;
}

Mask read_png_mask(const std::string& path) {
  int w, h, ch;
  const auto rows = read_png_rows(path, &w, &h, &ch);
  Mask mask(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) mask.at(y, x) = rows[y][static_cast<size_t>(x) * ch] != 0 ? 1 : 0;
  return mask;
}

void write_png_rgb(const std::string& path, const ImageRgb& img) {
  std::vector<uint8_t> bytes(static_cast<size_t>(img.height) * img.width * 3);
  for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_u8(img.data[i]);
  write_png_bytes(path, bytes, img.width, img.height, 3);
}

void write_png_mask(const std::string& path, const Mask& mask) {
  std::vector<uint8_t> bytes(static_cast<size_t>(mask.height) * mask.width);
  for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.data[i] ? 255 : 0;
  write_png_bytes(path, bytes, mask.width, mask.height, 1);
}

void write_ppm(const std::string& path, const ImageRgb& img) {
  FILE* f = fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot create PPM file: " + path);
  FileCloser closer{f};
  fprintf(f, "P6\n%d %d\n255\n", img.width, img.height);
  std::vector<uint8_t> bytes(static_cast<size_t>(img.height) * img.width * 3);
  for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = to_u8(img.data[i]);
  if (fwrite(bytes.data(), 1, bytes.size(), f) != bytes.size()) throw IoError("PPM write failed: " + path);
}

ImageRgb read_ppm(const std::string& path) {
  FILE* f = fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open PPM file: " + path);
  FileCloser closer{f};
  int w = 0, h = 0, maxval = 0;
  if (fscanf(f, "P6 %d %d %d", &w, &h, &maxval) != 3 || maxval != 255 || w <= 0 || h <= 0)
    throw IoError("malformed PPM header: " + path);
  fgetc(f);  // single whitespace after maxval
  std::vector<uint8_t> bytes(static_cast<size_t>(h) * w * 3);
  if (fread(bytes.data(), 1, bytes.size(), f) != bytes.size())
    throw IoError("unexpected EOF in PPM pixel data: " + path);
  ImageRgb img(h, w);
  for (size_t i = 0; i < bytes.size(); ++i) img.data[i] = bytes[i] / 255.0;
  return img;
}

}  // namespace pvx
