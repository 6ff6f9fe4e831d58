#include "iconforge/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include "iconforge/errors.hpp"

namespace iconforge {

RgbImage::RgbImage(int w, int h, Rgb fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Rgb RgbImage::get(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

void scanline_spans(std::span<const Path> loops, int width, int height,
                    const std::function<void(int, int, int)>& span) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const Path& loop : loops) {
    for (const Vec2& p : loop) {
      lo = std::min(lo, p.y);
      hi = std::max(hi, p.y);
    }
  }
  if (!(lo <= hi)) return;
  const int y_begin = std::max(0, static_cast<int>(std::floor(lo - 0.5)));
  const int y_end = std::min(height, static_cast<int>(std::ceil(hi + 0.5)));
  std::vector<double> xs;
  for (int y = y_begin; y < y_end; ++y) {
    const double sy = y + 0.5;
    xs.clear();
    for (const Path& loop : loops) {
      const std::size_t n = loop.size();
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = loop[j];
        const Vec2 b = loop[i];
        if ((a.y > sy) != (b.y > sy)) {
          xs.push_back(a.x + (sy - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Pixel centres x + 0.5 in [xs[k], xs[k+1]).
      const int x0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int x1 = std::min(width, static_cast<int>(std::ceil(xs[k + 1] - 0.5)));
      if (x1 > x0) span(y, x0, x1);
    }
  }
}

Mask rasterize_loops(std::span<const Path> loops, int width, int height) {
  Mask mask(width, height, 0);
  scanline_spans(loops, width, height, [&](int y, int x0, int x1) {
    std::fill(mask.data.begin() + static_cast<std::ptrdiff_t>(y) * width + x0,
              mask.data.begin() + static_cast<std::ptrdiff_t>(y) * width + x1, 1);
  });
  return mask;
}

std::size_t count_set(const Mask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data.begin(), mask.data.end(), [](std::uint8_t v) { return v != 0; }));
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& file, const char* mode) {
  FilePtr f(std::fopen(file.string().c_str(), mode));
  if (!f) throw IoError("cannot open " + file.string());
  return f;
}

}  // namespace

RgbImage read_png_rgb(const std::filesystem::path& file) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, file.string().c_str())) {
    throw IoError("cannot read PNG " + file.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
    png_image_free(&image);
    throw IoError("cannot decode PNG " + file.string() + ": " + image.message);
  }
  return out;
}

LabelRaster read_png_labels(const std::filesystem::path& file) {
  FilePtr f = open_file(file, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG " + file.string());
  }
  png_init_io(png, f.get());
  png_read_png(png, info, PNG_TRANSFORM_PACKING | PNG_TRANSFORM_STRIP_ALPHA, nullptr);
  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  png_bytepp rows = png_get_rows(png, info);
  LabelRaster out(width, height, 0);
  const bool gray = color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA ||
                    color == PNG_COLOR_TYPE_PALETTE;
  if (!gray) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("mask PNG must be grayscale or palette: " + file.string());
  }
  for (int y = 0; y < height; ++y) {
    const png_bytep row = rows[y];
    for (int x = 0; x < width; ++x) {
      out.at(x, y) = depth == 16 ? (row[2 * x] << 8) | row[2 * x + 1] : row[x];
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void write_png(const std::filesystem::path& file, const RgbImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, file.string().c_str(), 0, img.pixels.data(), 0, nullptr)) {
    throw IoError("cannot write PNG " + file.string() + ": " + image.message);
  }
}

}  // namespace iconforge
