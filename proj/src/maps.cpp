#include "cldmap/maps.hpp"

#include <numeric>
#include <string>

namespace cldmap {

SupportField::SupportField(int height, int width, int directions)
    : height_(height), width_(width), n_d_(directions),
      counts_(static_cast<std::size_t>(height) * width, 0) {}

DefectField::DefectField(int height, int width, double tau_prime)
    : height_(height), width_(width), tau_prime_(tau_prime),
      cells_(static_cast<std::size_t>(height) * width) {}

std::optional<double> DefectField::psi(int row, int col) const {
  const Cell& c = cells_[index(row, col)];
  if (c.eligible == 0) return std::nullopt;
  return 2.0 * c.conforming / c.eligible - 1.0;
}

DirectionalDefectField::DirectionalDefectField(int height, int width,
                                               double tau_second, QMeanMode mode)
    : height_(height), width_(width), tau_second_(tau_second), mode_(mode),
      q_(static_cast<std::size_t>(height) * width, 0.0),
      defined_(q_.size(), 0), flag_(q_.size(), 0) {}

std::optional<double> DirectionalDefectField::q(int row, int col) const {
  const auto i = index(row, col);
  if (!defined_[i]) return std::nullopt;
  return q_[i];
}

std::optional<bool> DirectionalDefectField::flag(int row, int col) const {
  const auto i = index(row, col);
  if (!defined_[i]) return std::nullopt;
  return flag_[i] != 0;
}

namespace {

void check_compatible(const LocalCLDField& field, const AverageCLD& avg) {
  if (avg.directions() != field.directions()) {
    throw ConfigError("average diagram has " + std::to_string(avg.directions()) +
                      " directions, field has " + std::to_string(field.directions()));
  }
}

// Sums over the eligible directions of one pixel.
struct EligibleSums {
  int count = 0;
  std::uint64_t local_sum = 0;
  double mean_sum = 0.0;
};

EligibleSums eligible_sums(const LocalCLDField& field, const AverageCLD& avg, Pixel p) {
  EligibleSums s;
  const auto diag = field.diagram(p.row, p.col);
  for (int k = 1; k <= field.directions(); ++k) {
    if (diag[k - 1] == LocalCLDField::kUndefined || !avg[k].present()) continue;
    ++s.count;
    s.local_sum += diag[k - 1];
    s.mean_sum += avg[k].mean();
  }
  return s;
}

EligibleSums require_eligible(const LocalCLDField& field, const AverageCLD& avg,
                              Pixel p) {
  check_compatible(field, avg);
  EligibleSums s = eligible_sums(field, avg, p);
  if (s.count == 0) {
    throw DegenerateError("pixel (" + std::to_string(p.row) + ", " +
                          std::to_string(p.col) + ") has no eligible direction");
  }
  return s;
}

// Common multiple of the eligible cardinalities, or 0 when it grows past 2^40.
std::uint64_t common_cardinality(const LocalCLDField& field, const AverageCLD& avg, Pixel p) {
  const auto diag = field.diagram(p.row, p.col);
  std::uint64_t c = 1;
  for (int k = 1; k <= field.directions(); ++k) {
    if (diag[k - 1] == LocalCLDField::kUndefined || !avg[k].present()) continue;
    c = std::lcm(c, avg[k].cardinality);
    if (c > (std::uint64_t{1} << 40)) return 0;
  }
  return c;
}

double normalized_sum(const LocalCLDField& field, const AverageCLD& avg, Pixel p,
                      const EligibleSums& s) {
  const auto diag = field.diagram(p.row, p.col);
  const double local_total = static_cast<double>(s.local_sum);
  const double sigma = static_cast<double>(field.directions()) / s.count;
  auto eligible = [&](int k) {
    return diag[k - 1] != LocalCLDField::kUndefined && avg[k].present();
  };

  // Scaled by C every difference is an integer, so proportional diagrams give exactly 0.
  if (const std::uint64_t c = common_cardinality(field, avg, p)) {
    using Wide = __int128;
    Wide mean_sum = 0;
    for (int k = 1; k <= field.directions(); ++k) {
      if (eligible(k)) mean_sum += Wide(avg[k].length_sum) * (c / avg[k].cardinality);
    }
    double acc = 0.0;
    for (int k = 1; k <= field.directions(); ++k) {
      if (!eligible(k)) continue;
      const Wide d = mean_sum * diag[k - 1] -
                     Wide(s.local_sum) * avg[k].length_sum * (c / avg[k].cardinality);
      const double dd = static_cast<double>(d);
      acc += dd * dd;
    }
    const double scale = static_cast<double>(c) * local_total;
    return sigma * acc / (scale * scale);
  }

  double acc = 0.0;
  for (int k = 1; k <= field.directions(); ++k) {
    if (!eligible(k)) continue;
    const double d = s.mean_sum * diag[k - 1] - local_total * avg[k].mean();
    acc += d * d;
  }
  return sigma * acc / (local_total * local_total);
}

}  // namespace

SupportField support_map(const LocalCLDField& field) {
  SupportField out(field.height(), field.width(), field.directions());
  for (int row = 0; row < field.height(); ++row) {
    for (int col = 0; col < field.width(); ++col) {
      int n = 0;
      for (std::uint32_t l : field.diagram(row, col)) n += l != LocalCLDField::kUndefined;
      out.set_count(row, col, n);
    }
  }
  return out;
}

bool directional_success(std::uint32_t local, double mean, double tau_prime) {
  const double l = static_cast<double>(local);
  return l >= mean * (1.0 - tau_prime) && l <= mean * (1.0 + tau_prime);
}

DefectField defect_map(const LocalCLDField& field, const AverageCLD& avg,
                       double tau_prime) {
  if (!(tau_prime > 0.0)) throw ConfigError("tau' must be positive");
  check_compatible(field, avg);
  DefectField out(field.height(), field.width(), tau_prime);
  for (int row = 0; row < field.height(); ++row) {
    for (int col = 0; col < field.width(); ++col) {
      const auto diag = field.diagram(row, col);
      int eligible = 0;
      int conforming = 0;
      for (int k = 1; k <= field.directions(); ++k) {
        if (diag[k - 1] == LocalCLDField::kUndefined || !avg[k].present()) continue;
        ++eligible;
        conforming += directional_success(diag[k - 1], avg[k].mean(), tau_prime);
      }
      out.set(row, col, conforming, eligible);
    }
  }
  return out;
}

int eligible_count(const LocalCLDField& field, const AverageCLD& avg, Pixel p) {
  check_compatible(field, avg);
  return eligible_sums(field, avg, p).count;
}

double raw_square_sum(const LocalCLDField& field, const AverageCLD& avg, Pixel p) {
  require_eligible(field, avg, p);
  const auto diag = field.diagram(p.row, p.col);
  double acc = 0.0;
  for (int k = 1; k <= field.directions(); ++k) {
    if (diag[k - 1] == LocalCLDField::kUndefined || !avg[k].present()) continue;
    const double d = diag[k - 1] - avg[k].mean();
    acc += d * d;
  }
  return acc;
}

double scale_factor(const LocalCLDField& field, const AverageCLD& avg, Pixel p) {
  const EligibleSums s = require_eligible(field, avg, p);
  return s.mean_sum / static_cast<double>(s.local_sum);
}

double direction_count_factor(const LocalCLDField& field, const AverageCLD& avg,
                              Pixel p) {
  const EligibleSums s = require_eligible(field, avg, p);
  return static_cast<double>(field.directions()) / s.count;
}

double normalized_square_sum(const LocalCLDField& field, const AverageCLD& avg,
                             Pixel p) {
  const EligibleSums s = require_eligible(field, avg, p);
  return normalized_sum(field, avg, p, s);
}

DirectionalDefectField directional_defect_map(const LocalCLDField& field,
                                              const AverageCLD& avg,
                                              double tau_second, QMeanMode mode) {
  if (!(tau_second > 0.0)) throw ConfigError("tau'' must be positive");
  check_compatible(field, avg);
  DirectionalDefectField out(field.height(), field.width(), tau_second, mode);

  double total = 0.0;
  for (int row = 0; row < field.height(); ++row) {
    for (int col = 0; col < field.width(); ++col) {
      const Pixel p{row, col};
      const EligibleSums s = eligible_sums(field, avg, p);
      if (s.count == 0) continue;
      const auto i = out.index(row, col);
      out.q_[i] = normalized_sum(field, avg, p, s);
      out.defined_[i] = 1;
      out.defined_count_ += 1;
      total += out.q_[i];
    }
  }
  if (out.defined_count_ == 0) {
    throw DegenerateError("no pixel has an eligible direction");
  }
  const double divisor = mode == QMeanMode::defined_pixels
                             ? static_cast<double>(out.defined_count_)
                             : static_cast<double>(field.height()) * field.width();
  out.mean_q_ = total / divisor;

  const double lo = out.band_low();
  const double hi = out.band_high();
  for (std::size_t i = 0; i < out.q_.size(); ++i) {
    if (out.defined_[i]) out.flag_[i] = out.q_[i] >= lo && out.q_[i] <= hi;
  }
  return out;
}

MixedLayers mixed_map(const DefectField& dmap, const DirectionalDefectField& ddmap) {
  if (dmap.height() != ddmap.height() || dmap.width() != ddmap.width()) {
    throw DimensionError("defect and directional defect layers differ in size");
  }
  return MixedLayers{dmap, ddmap};
}

}  // namespace cldmap
