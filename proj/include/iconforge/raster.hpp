#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "iconforge/geometry.hpp"

namespace iconforge {

template <class T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Grid() = default;
  Grid(int w, int h, T fill = T{})
      : width(w), height(h), data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  T& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  const T& at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  /// Out-of-range reads return T{}.
  T get(int x, int y) const { return contains(x, y) ? at(x, y) : T{}; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

using Mask = Grid<std::uint8_t>;
using LabelRaster = Grid<std::int32_t>;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(Rgb, Rgb) = default;
};

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major RGB triples

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {});

  Rgb get(int x, int y) const;
  void set(int x, int y, Rgb c);
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

/// Calls span(y, x_begin, x_end) for every run of pixels whose centres lie
/// inside the loops under the even-odd rule. Pixel (x, y) has centre
/// (x + 0.5, y + 0.5); x_end is exclusive.
void scanline_spans(std::span<const Path> loops, int width, int height,
                    const std::function<void(int, int, int)>& span);

Mask rasterize_loops(std::span<const Path> loops, int width, int height);

std::size_t count_set(const Mask& mask);

RgbImage read_png_rgb(const std::filesystem::path& file);
/// Reads a grayscale (8- or 16-bit) or palette PNG as integer labels.
LabelRaster read_png_labels(const std::filesystem::path& file);
void write_png(const std::filesystem::path& file, const RgbImage& image);

}  // namespace iconforge
