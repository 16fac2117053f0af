#include "cldmap/directions.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cldmap {

int round_half_away(double x) {
  return static_cast<int>(std::round(x));
}

DirectionTable::DirectionTable(int n_d, int max_radius)
    : n_d_(n_d), max_radius_(max_radius) {
  if (n_d < 4 || n_d % 4 != 0) {
    throw ConfigError("direction count must be a positive multiple of 4, got " +
                      std::to_string(n_d));
  }
  if (max_radius < 1) {
    throw ConfigError("maximum ray radius must be at least 1");
  }

  const int quarter = n_d / 4;
  offsets_.resize(static_cast<std::size_t>(n_d) * stride());

  // k = n_d is the zero angle; quadrant q holds k = q*quarter .. q*quarter +
  // quarter - 1 (mod n_d) and is the first quadrant rotated q times.
  std::vector<Offset> base(static_cast<std::size_t>(quarter) * stride());
  for (int m = 0; m < quarter; ++m) {
    const double theta = 2.0 * std::numbers::pi * m / n_d;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int r = 0; r <= max_radius; ++r) {
      Offset& o = base[static_cast<std::size_t>(m) * stride() + r];
      o.di = round_half_away(r * c);
      o.dj = round_half_away(r * s);
    }
  }

  for (int k = 1; k <= n_d; ++k) {
    const int m = k % n_d;
    const int q = m / quarter;
    const int rem = m % quarter;
    for (int r = 0; r <= max_radius; ++r) {
      Offset o = base[static_cast<std::size_t>(rem) * stride() + r];
      for (int t = 0; t < q; ++t) o = Offset{-o.dj, o.di};
      offsets_[static_cast<std::size_t>(k - 1) * stride() + r] = o;
    }
  }
}

double DirectionTable::angle(int k) const {
  return k * (2.0 * std::numbers::pi / n_d_);
}

int DirectionTable::shifted(int k, int shift) const {
  int m = (k - 1 + shift) % n_d_;
  if (m < 0) m += n_d_;
  return m + 1;
}

int default_max_radius(int height, int width) {
  const std::int64_t sq = std::int64_t{height} * height + std::int64_t{width} * width;
  auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(sq)));
  while (root * root < sq) ++root;
  while (root > 0 && (root - 1) * (root - 1) >= sq) --root;
  return static_cast<int>(root);
}

int ray_extent(int height, int width, Pixel origin, int k,
               const DirectionTable& table) {
  const auto offs = table.offsets(k);
  int lambda = 0;
  for (int r = 1; r <= table.max_radius(); ++r) {
    const int i = origin.row + offs[r].di;
    const int j = origin.col + offs[r].dj;
    if (i < 0 || i >= height || j < 0 || j >= width) break;
    lambda = r;
  }
  return lambda;
}

}  // namespace cldmap
