#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cldmap/image.hpp"

namespace cldmap {

/// Integer step of a digital ray relative to its origin pixel.
struct Offset {
  int di = 0;  // rows
  int dj = 0;  // columns

  friend bool operator==(const Offset&, const Offset&) = default;
};

/// Rounds half away from zero.
int round_half_away(double x);

/// The direction set theta_k = k * 2*pi / n_d, k = 1..n_d, and for each
/// direction the digital ray offsets (round(r cos theta_k),
/// round(r sin theta_k)) for r = 0..max_radius.
///
/// The row offset follows cos and the column offset follows sin, so k = n_d
/// walks down the rows and k = n_d/4 walks right along the columns. Every
/// radius gets its own sample; offsets repeated by rounding are kept.
///
/// Offsets are built from the first quadrant and rotated, which makes
/// direction k + n_d/4 the exact quarter-turn image (di, dj) -> (-dj, di)
/// of direction k. Immutable after construction.
class DirectionTable {
 public:
  /// Throws ConfigError unless n_d is a positive multiple of 4 and
  /// max_radius >= 1.
  DirectionTable(int n_d, int max_radius);

  int count() const { return n_d_; }
  int max_radius() const { return max_radius_; }

  /// Angle of direction k in radians, k in 1..n_d.
  double angle(int k) const;

  /// Offsets for r = 0..max_radius of direction k (1..n_d).
  std::span<const Offset> offsets(int k) const {
    return std::span<const Offset>(offsets_).subspan(
        static_cast<std::size_t>(k - 1) * stride(), stride());
  }

  Offset offset(int k, int r) const { return offsets(k)[r]; }

  /// Direction index k + shift wrapped into 1..n_d.
  int shifted(int k, int shift) const;

 private:
  std::size_t stride() const { return static_cast<std::size_t>(max_radius_) + 1; }

  int n_d_;
  int max_radius_;
  std::vector<Offset> offsets_;
};

/// ceil(sqrt(h^2 + w^2)): the longest useful ray on an h x w image.
int default_max_radius(int height, int width);

/// Largest lambda <= table.max_radius() such that the samples r = 0..lambda
/// of direction k starting at `origin` all lie inside a height x width
/// image. 0 when the r = 1 sample already leaves the image.
int ray_extent(int height, int width, Pixel origin, int k,
               const DirectionTable& table);

}  // namespace cldmap
