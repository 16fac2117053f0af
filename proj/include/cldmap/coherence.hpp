#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cldmap/directions.hpp"
#include "cldmap/image.hpp"

namespace cldmap {

/// How the directional sum of lambda + 1 samples is turned into a mean.
enum class Normalization {
  count,    // divide by lambda + 1, the number of samples
  literal,  // divide by lambda
};

std::string_view to_string(Normalization mode);
Normalization parse_normalization(std::string_view text);

struct AnalysisConfig {
  double tau = 0.30;
  int directions = 32;
  Normalization normalization = Normalization::count;
  /// Caps the ray radius below the image diagonal when set.
  std::optional<int> max_radius_cap;

  /// Throws ConfigError on tau outside (0, 1], bad direction count or a
  /// non-positive cap.
  void validate() const;

  /// Ray radius used on a height x width image.
  int max_radius(int height, int width) const;
};

/// Per-pixel, per-direction local coherence lengths.
///
/// Entries are stored pixel-major: the n_d lengths of a pixel are
/// contiguous. A stored 0 means the length is undefined for that pixel and
/// direction, i.e. the pixel is outside the support set of the direction.
class LocalCLDField {
 public:
  static constexpr std::uint32_t kUndefined = 0;

  LocalCLDField(int height, int width, int directions);
  LocalCLDField(int height, int width, int directions,
                std::vector<std::uint32_t> lengths);

  int height() const { return height_; }
  int width() const { return width_; }
  int directions() const { return n_d_; }

  /// Length at (row, col) for direction k in 1..n_d; kUndefined if none.
  std::uint32_t at(int row, int col, int k) const {
    return lengths_[slot(row, col, k)];
  }
  std::uint32_t& at(int row, int col, int k) { return lengths_[slot(row, col, k)]; }

  bool defined(int row, int col, int k) const { return at(row, col, k) != kUndefined; }

  /// The local diagram of one pixel: index k - 1 holds direction k.
  std::span<const std::uint32_t> diagram(int row, int col) const {
    return std::span<const std::uint32_t>(lengths_).subspan(slot(row, col, 1), n_d_);
  }
  std::span<std::uint32_t> diagram(int row, int col) {
    return std::span<std::uint32_t>(lengths_).subspan(slot(row, col, 1), n_d_);
  }

  std::span<const std::uint32_t> lengths() const { return lengths_; }

  friend bool operator==(const LocalCLDField&, const LocalCLDField&) = default;

 private:
  std::size_t slot(int row, int col, int k) const {
    return (static_cast<std::size_t>(row) * width_ + col) * n_d_ + (k - 1);
  }

  int height_;
  int width_;
  int n_d_;
  std::vector<std::uint32_t> lengths_;
};

/// Per-direction mean of the defined local lengths. Direction k is missing
/// when no pixel has a defined length for it.
struct DirectionMean {
  std::uint64_t length_sum = 0;
  std::uint64_t cardinality = 0;

  bool present() const { return cardinality > 0; }
  double mean() const {
    return static_cast<double>(length_sum) / static_cast<double>(cardinality);
  }
};

struct AverageCLD {
  /// Index k - 1 holds direction k.
  std::vector<DirectionMean> per_direction;

  int directions() const { return static_cast<int>(per_direction.size()); }
  const DirectionMean& operator[](int k) const { return per_direction[k - 1]; }

  /// max mean / min mean over present directions; nullopt if none present.
  std::optional<double> anisotropy_ratio() const;
};

/// Mean brightness along direction k over the samples r = 0..lambda.
/// Throws OutOfBoundsError if lambda < 1 or the ray leaves the image before
/// lambda.
double local_moment(const GrayImage& img, Pixel origin, int k, int lambda,
                    Normalization mode, const DirectionTable& table);

/// Smallest lambda >= 1 whose directional mean deviates from the global mean
/// by at most tau (relative, closed test); nullopt if no lambda inside the
/// image qualifies.
std::optional<int> local_coherence_length(const GrayImage& img,
                                          const MeanFraction<std::uint64_t>& mean,
                                          Pixel origin, int k,
                                          const AnalysisConfig& cfg,
                                          const DirectionTable& table);

/// Relative deviation test |S/d - T/N| <= tau * T/N in cross-multiplied
/// form, where S is the sum of d-normalized ray samples and T/N the global
/// mean. Shared by every engine so that all of them take identical
/// decisions at ties.
inline bool within_tolerance(std::int64_t ray_sum, std::int64_t divisor,
                             const MeanFraction<std::uint64_t>& mean, double tau) {
  const auto n = static_cast<std::int64_t>(mean.count);
  const auto t = static_cast<std::int64_t>(mean.total);
  std::int64_t diff = ray_sum * n - t * divisor;
  if (diff < 0) diff = -diff;
  return static_cast<double>(diff) <= tau * static_cast<double>(t * divisor);
}

inline bool within_tolerance(double ray_sum, double divisor,
                             const MeanFraction<double>& mean, double tau) {
  const double n = static_cast<double>(mean.count);
  const double diff = std::abs(ray_sum * n - mean.total * divisor);
  return diff <= tau * (mean.total * divisor);
}

/// Incremental engine: one running sum per ray, rows processed in parallel
/// by `threads` workers (0 = hardware concurrency). The result does not
/// depend on the thread count. Throws DegenerateError when the global mean
/// is zero.
LocalCLDField compute_local_field(const GrayImage& img, const AnalysisConfig& cfg,
                                  unsigned threads = 0);
LocalCLDField compute_local_field(const RealImage& img, const AnalysisConfig& cfg,
                                  unsigned threads = 0);

/// Reference engine: single-threaded, rebuilds every directional sum from
/// scratch for each candidate lambda and bounds-checks every sample.
LocalCLDField oracle_local_field(const GrayImage& img, const AnalysisConfig& cfg);
LocalCLDField oracle_local_field(const RealImage& img, const AnalysisConfig& cfg);

AverageCLD average_cld(const LocalCLDField& field);

/// Number of workers used for `requested` (0 = hardware concurrency).
unsigned resolve_threads(unsigned requested);

}  // namespace cldmap
