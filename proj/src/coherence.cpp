#include "cldmap/coherence.hpp"

#include <algorithm>
#include <atomic>
#include <string>
#include <thread>

namespace cldmap {

std::string_view to_string(Normalization mode) {
  return mode == Normalization::count ? "count" : "literal";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "count") return Normalization::count;
  if (text == "literal") return Normalization::literal;
  throw ConfigError("unknown normalization mode '" + std::string(text) +
                    "' (expected count or literal)");
}

void AnalysisConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw ConfigError("tau must lie in (0, 1], got " + std::to_string(tau));
  }
  if (directions < 4 || directions % 4 != 0) {
    throw ConfigError("direction count must be a positive multiple of 4, got " +
                      std::to_string(directions));
  }
  if (max_radius_cap && *max_radius_cap < 1) {
    throw ConfigError("ray radius cap must be at least 1");
  }
}

int AnalysisConfig::max_radius(int height, int width) const {
  const int diag = default_max_radius(height, width);
  return max_radius_cap ? std::min(diag, *max_radius_cap) : diag;
}

LocalCLDField::LocalCLDField(int height, int width, int directions)
    : height_(height), width_(width), n_d_(directions) {
  if (height < 1 || width < 1 || directions < 1) {
    throw DimensionError("field dimensions must be positive");
  }
  lengths_.assign(static_cast<std::size_t>(height) * width * directions, kUndefined);
}

LocalCLDField::LocalCLDField(int height, int width, int directions,
                             std::vector<std::uint32_t> lengths)
    : LocalCLDField(height, width, directions) {
  if (lengths.size() != lengths_.size()) {
    throw DimensionError("length buffer does not match field dimensions");
  }
  lengths_ = std::move(lengths);
}

std::optional<double> AverageCLD::anisotropy_ratio() const {
  std::optional<double> lo;
  std::optional<double> hi;
  for (const auto& d : per_direction) {
    if (!d.present()) continue;
    const double m = d.mean();
    lo = lo ? std::min(*lo, m) : m;
    hi = hi ? std::max(*hi, m) : m;
  }
  if (!lo) return std::nullopt;
  return *hi / *lo;
}

namespace {

std::int64_t divisor_for(int lambda, Normalization mode) {
  return mode == Normalization::count ? lambda + 1 : lambda;
}

template <typename T>
using SumOf = std::conditional_t<std::is_integral_v<T>, std::int64_t, double>;

void check_nondegenerate(const auto& mean) {
  if (!(mean.total > 0)) {
    throw DegenerateError("global mean brightness is zero; coherence lengths "
                          "are undefined");
  }
}

// Walks every ray of one pixel with a running sum and stops at the first
// qualifying lambda.
template <typename T, typename Mean>
void fill_pixel(const Image<T>& img, const Mean& mean, const AnalysisConfig& cfg,
                const DirectionTable& table, int row, int col,
                std::span<std::uint32_t> out) {
  using Sum = SumOf<T>;
  const int h = img.height();
  const int w = img.width();
  const auto px = img.pixels();
  const Sum origin = static_cast<Sum>(img(row, col));
  for (int k = 1; k <= table.count(); ++k) {
    const auto offs = table.offsets(k);
    Sum sum = origin;
    std::uint32_t found = LocalCLDField::kUndefined;
    for (int r = 1; r <= table.max_radius(); ++r) {
      const int i = row + offs[r].di;
      const int j = col + offs[r].dj;
      if (i < 0 || i >= h || j < 0 || j >= w) break;
      sum += static_cast<Sum>(px[static_cast<std::size_t>(i) * w + j]);
      if (within_tolerance(sum, static_cast<Sum>(divisor_for(r, cfg.normalization)),
                           mean, cfg.tau)) {
        found = static_cast<std::uint32_t>(r);
        break;
      }
    }
    out[k - 1] = found;
  }
}

template <typename T>
LocalCLDField run_engine(const Image<T>& img, const AnalysisConfig& cfg,
                         unsigned threads) {
  cfg.validate();
  const auto mean = global_mean(img);
  check_nondegenerate(mean);
  const DirectionTable table(cfg.directions, cfg.max_radius(img.height(), img.width()));
  LocalCLDField field(img.height(), img.width(), cfg.directions);

  std::atomic<int> next_row{0};
  auto worker = [&] {
    for (int row = next_row.fetch_add(1); row < img.height();
         row = next_row.fetch_add(1)) {
      for (int col = 0; col < img.width(); ++col) {
        fill_pixel(img, mean, cfg, table, row, col, field.diagram(row, col));
      }
    }
  };

  const unsigned n = std::min<unsigned>(resolve_threads(threads),
                                        static_cast<unsigned>(img.height()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return field;
}

// Sum of the samples r = 0..lambda, each sample bounds-checked; nullopt if
// any sample falls outside the image.
template <typename T>
std::optional<SumOf<T>> ray_sum_from_scratch(const Image<T>& img, Pixel origin,
                                             int k, int lambda,
                                             const DirectionTable& table) {
  SumOf<T> sum{};
  for (int r = 0; r <= lambda; ++r) {
    const Offset o = table.offset(k, r);
    const int i = origin.row + o.di;
    const int j = origin.col + o.dj;
    if (!img.contains(i, j)) return std::nullopt;
    sum += static_cast<SumOf<T>>(img(i, j));
  }
  return sum;
}

template <typename T>
LocalCLDField run_oracle(const Image<T>& img, const AnalysisConfig& cfg) {
  cfg.validate();
  const auto mean = global_mean(img);
  check_nondegenerate(mean);
  const DirectionTable table(cfg.directions, cfg.max_radius(img.height(), img.width()));
  LocalCLDField field(img.height(), img.width(), cfg.directions);
  for (int row = 0; row < img.height(); ++row) {
    for (int col = 0; col < img.width(); ++col) {
      for (int k = 1; k <= cfg.directions; ++k) {
        for (int lambda = 1; lambda <= table.max_radius(); ++lambda) {
          const auto sum = ray_sum_from_scratch(img, {row, col}, k, lambda, table);
          if (!sum) break;
          const auto d = static_cast<SumOf<T>>(divisor_for(lambda, cfg.normalization));
          if (within_tolerance(*sum, d, mean, cfg.tau)) {
            field.at(row, col, k) = static_cast<std::uint32_t>(lambda);
            break;
          }
        }
      }
    }
  }
  return field;
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

double local_moment(const GrayImage& img, Pixel origin, int k, int lambda,
                    Normalization mode, const DirectionTable& table) {
  if (lambda < 1 || lambda > table.max_radius()) {
    throw OutOfBoundsError("ray length " + std::to_string(lambda) +
                           " outside [1, " + std::to_string(table.max_radius()) + "]");
  }
  const auto sum = ray_sum_from_scratch(img, origin, k, lambda, table);
  if (!sum) {
    throw OutOfBoundsError("ray of length " + std::to_string(lambda) +
                           " leaves the image");
  }
  return static_cast<double>(*sum) / static_cast<double>(divisor_for(lambda, mode));
}

std::optional<int> local_coherence_length(const GrayImage& img,
                                          const MeanFraction<std::uint64_t>& mean,
                                          Pixel origin, int k,
                                          const AnalysisConfig& cfg,
                                          const DirectionTable& table) {
  const int extent = ray_extent(img.height(), img.width(), origin, k, table);
  std::int64_t sum = img(origin.row, origin.col);
  const auto offs = table.offsets(k);
  for (int lambda = 1; lambda <= extent; ++lambda) {
    sum += img(origin.row + offs[lambda].di, origin.col + offs[lambda].dj);
    if (within_tolerance(sum, divisor_for(lambda, cfg.normalization), mean, cfg.tau)) {
      return lambda;
    }
  }
  return std::nullopt;
}

LocalCLDField compute_local_field(const GrayImage& img, const AnalysisConfig& cfg,
                                  unsigned threads) {
  return run_engine(img, cfg, threads);
}

LocalCLDField compute_local_field(const RealImage& img, const AnalysisConfig& cfg,
                                  unsigned threads) {
  return run_engine(img, cfg, threads);
}

LocalCLDField oracle_local_field(const GrayImage& img, const AnalysisConfig& cfg) {
  return run_oracle(img, cfg);
}

LocalCLDField oracle_local_field(const RealImage& img, const AnalysisConfig& cfg) {
  return run_oracle(img, cfg);
}

AverageCLD average_cld(const LocalCLDField& field) {
  AverageCLD avg;
  avg.per_direction.resize(field.directions());
  for (int row = 0; row < field.height(); ++row) {
    for (int col = 0; col < field.width(); ++col) {
      const auto diag = field.diagram(row, col);
      for (int k = 0; k < field.directions(); ++k) {
        if (diag[k] == LocalCLDField::kUndefined) continue;
        avg.per_direction[k].length_sum += diag[k];
        avg.per_direction[k].cardinality += 1;
      }
    }
  }
  return avg;
}

}  // namespace cldmap
