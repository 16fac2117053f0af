#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cldmap/error.hpp"

namespace cldmap {

/// Pixel coordinate. Zero-based: row in [0, height), col in [0, width).
struct Pixel {
  int row = 0;
  int col = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Dense row-major single-channel image.
///
/// Both dimensions are at least one; constructing an empty image throws
/// DimensionError. `GrayImage` holds 8-bit brightness, `RealImage` holds
/// non-negative real brightness and is used where exact real-valued
/// arithmetic is wanted (e.g. brightness scaling).
template <typename T>
class Image {
 public:
  using value_type = T;

  Image(int height, int width, T fill = T{})
      : height_(height), width_(width) {
    check_dims(height, width);
    pixels_.assign(static_cast<std::size_t>(height) * width, fill);
  }

  Image(int height, int width, std::vector<T> pixels)
      : height_(height), width_(width), pixels_(std::move(pixels)) {
    check_dims(height, width);
    if (pixels_.size() != static_cast<std::size_t>(height) * width) {
      throw DimensionError("pixel buffer size does not match " +
                           std::to_string(height) + "x" +
                           std::to_string(width));
    }
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }

  bool contains(int row, int col) const {
    return row >= 0 && row < height_ && col >= 0 && col < width_;
  }

  T operator()(int row, int col) const { return pixels_[index(row, col)]; }
  T& operator()(int row, int col) { return pixels_[index(row, col)]; }

  std::span<const T> pixels() const { return pixels_; }
  std::span<T> pixels() { return pixels_; }

  std::span<const T> row(int r) const {
    return std::span<const T>(pixels_).subspan(
        static_cast<std::size_t>(r) * width_, width_);
  }

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  static void check_dims(int height, int width) {
    if (height < 1 || width < 1) {
      throw DimensionError("image dimensions must be positive, got " +
                           std::to_string(height) + "x" +
                           std::to_string(width));
    }
  }

  int height_;
  int width_;
  std::vector<T> pixels_;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

using GrayImage = Image<std::uint8_t>;
using RealImage = Image<double>;
using RgbImage = Image<Rgb>;

/// Global mean brightness kept as an exact fraction `total / count`.
/// For GrayImage the total is an exact integer; for RealImage it is the
/// row-major double sum.
template <typename Sum>
struct MeanFraction {
  Sum total{};
  std::uint64_t count = 0;

  double value() const {
    return static_cast<double>(total) / static_cast<double>(count);
  }
};

MeanFraction<std::uint64_t> global_mean(const GrayImage& img);
MeanFraction<double> global_mean(const RealImage& img);

RealImage to_real(const GrayImage& img);
RealImage scale_brightness(const RealImage& img, double alpha);

/// Quarter-turn rotation. Pixel (r, c) of the source lands on
/// (width - 1 - c, r) of the result, so a ray offset (di, dj) becomes
/// (-dj, di): direction k maps onto direction k + n_d/4.
template <typename T>
Image<T> rotate_quarter(const Image<T>& img) {
  Image<T> out(img.width(), img.height());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      out(img.width() - 1 - c, r) = img(r, c);
    }
  }
  return out;
}

}  // namespace cldmap
