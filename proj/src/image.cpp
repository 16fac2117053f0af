#include "cldmap/image.hpp"

#include <cmath>

namespace cldmap {

MeanFraction<std::uint64_t> global_mean(const GrayImage& img) {
  MeanFraction<std::uint64_t> m;
  for (std::uint8_t v : img.pixels()) m.total += v;
  m.count = img.size();
  return m;
}

MeanFraction<double> global_mean(const RealImage& img) {
  MeanFraction<double> m;
  for (double v : img.pixels()) m.total += v;
  m.count = img.size();
  return m;
}

RealImage to_real(const GrayImage& img) {
  RealImage out(img.height(), img.width());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  return out;
}

RealImage scale_brightness(const RealImage& img, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("brightness scale must be positive and finite");
  }
  RealImage out = img;
  for (double& v : out.pixels()) v *= alpha;
  return out;
}

}  // namespace cldmap
