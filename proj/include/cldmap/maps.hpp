#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cldmap/coherence.hpp"

namespace cldmap {

/// Fraction of directions with a defined coherence length, per pixel.
class SupportField {
 public:
  SupportField(int height, int width, int directions);

  int height() const { return height_; }
  int width() const { return width_; }
  int directions() const { return n_d_; }

  int defined_count(int row, int col) const { return counts_[index(row, col)]; }
  double at(int row, int col) const {
    return static_cast<double>(defined_count(row, col)) / n_d_;
  }

  void set_count(int row, int col, int count) {
    counts_[index(row, col)] = static_cast<std::uint16_t>(count);
  }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_;
  int width_;
  int n_d_;
  std::vector<std::uint16_t> counts_;
};

/// Per-pixel conformity score in [-1, 1]: 2 * conforming / eligible - 1.
/// Undefined where a pixel has no eligible direction.
class DefectField {
 public:
  DefectField(int height, int width, double tau_prime);

  int height() const { return height_; }
  int width() const { return width_; }
  double tau_prime() const { return tau_prime_; }

  int eligible(int row, int col) const { return cells_[index(row, col)].eligible; }
  int conforming(int row, int col) const { return cells_[index(row, col)].conforming; }
  std::optional<double> psi(int row, int col) const;

  void set(int row, int col, int conforming, int eligible) {
    cells_[index(row, col)] = {static_cast<std::uint16_t>(conforming),
                               static_cast<std::uint16_t>(eligible)};
  }

 private:
  struct Cell {
    std::uint16_t conforming = 0;
    std::uint16_t eligible = 0;
  };

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_;
  int width_;
  double tau_prime_;
  std::vector<Cell> cells_;
};

/// How the reference value of the normalized square sum is averaged.
enum class QMeanMode {
  defined_pixels,  // mean over pixels with at least one eligible direction
  all_pixels,      // sum over defined pixels divided by height * width
};

/// Normalized shape difference between local and average diagrams, and its
/// band flag against the field-wide mean.
class DirectionalDefectField {
 public:
  DirectionalDefectField(int height, int width, double tau_second, QMeanMode mode);

  int height() const { return height_; }
  int width() const { return width_; }
  double tau_second() const { return tau_second_; }
  QMeanMode mean_mode() const { return mode_; }

  std::optional<double> q(int row, int col) const;
  /// Band flag; nullopt where the pixel is undefined.
  std::optional<bool> flag(int row, int col) const;

  double mean_q() const { return mean_q_; }
  std::uint64_t defined_count() const { return defined_count_; }

  /// Lower and upper bound of the acceptance band (closed).
  double band_low() const { return mean_q_ * (1.0 - tau_second_); }
  double band_high() const { return mean_q_ * (1.0 + tau_second_); }

 private:
  friend DirectionalDefectField directional_defect_map(const LocalCLDField&,
                                                       const AverageCLD&, double,
                                                       QMeanMode);

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  int height_;
  int width_;
  double tau_second_;
  QMeanMode mode_;
  std::vector<double> q_;
  std::vector<std::uint8_t> defined_;
  std::vector<std::uint8_t> flag_;
  double mean_q_ = 0.0;
  std::uint64_t defined_count_ = 0;
};

SupportField support_map(const LocalCLDField& field);

/// 1 if `local` lies in the closed band [mean(1 - tau'), mean(1 + tau')].
bool directional_success(std::uint32_t local, double mean, double tau_prime);

/// Throws ConfigError unless tau_prime > 0 and the average has the field's
/// direction count.
DefectField defect_map(const LocalCLDField& field, const AverageCLD& avg,
                       double tau_prime);

/// Directions defined at the pixel and present in the average diagram.
int eligible_count(const LocalCLDField& field, const AverageCLD& avg, Pixel p);

// The per-pixel quantities below require at least one eligible direction
// and throw DegenerateError otherwise.

/// Sum over eligible k of (l_k - mean_k)^2.
double raw_square_sum(const LocalCLDField& field, const AverageCLD& avg, Pixel p);
/// Mean of mean_k over eligible k divided by the mean of l_k over eligible k.
double scale_factor(const LocalCLDField& field, const AverageCLD& avg, Pixel p);
/// n_d / eligible count.
double direction_count_factor(const LocalCLDField& field, const AverageCLD& avg,
                              Pixel p);
/// sigma * sum over eligible k of (rho * l_k - mean_k)^2, evaluated as
/// sigma * sum (M * l_k - L * mean_k)^2 / L^2 with M = sum mean_k and
/// L = sum l_k, so proportional diagrams give exactly zero whenever the
/// products are exact.
double normalized_square_sum(const LocalCLDField& field, const AverageCLD& avg,
                             Pixel p);

/// Throws ConfigError unless tau_second > 0, DegenerateError when no pixel
/// has an eligible direction.
DirectionalDefectField directional_defect_map(const LocalCLDField& field,
                                              const AverageCLD& avg,
                                              double tau_second,
                                              QMeanMode mode = QMeanMode::defined_pixels);

/// Both layers of the mixed map, handed to the renderer unchanged.
struct MixedLayers {
  DefectField defects;
  DirectionalDefectField boundaries;
};

/// Throws DimensionError when the layers differ in size.
MixedLayers mixed_map(const DefectField& dmap, const DirectionalDefectField& ddmap);

}  // namespace cldmap
