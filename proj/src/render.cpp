#include "cldmap/render.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cldmap/directions.hpp"

namespace cldmap {
namespace {

template <typename Layer>
void check_size(const GrayImage& img, const Layer& layer) {
  if (img.height() != layer.height() || img.width() != layer.width()) {
    throw DimensionError("overlay layer is " + std::to_string(layer.height()) + "x" +
                         std::to_string(layer.width()) + ", image is " +
                         std::to_string(img.height()) + "x" +
                         std::to_string(img.width()));
  }
}

std::uint8_t add_clamped(std::uint8_t base, double amount) {
  const int v = int{base} + round_half_away(255.0 * amount);
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

OverlayImage gray_base(const GrayImage& img) {
  OverlayImage out(img.height(), img.width());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = {src[i], src[i], src[i]};
  return out;
}

void paint_defects(OverlayImage& out, const DefectField& dmap) {
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      const auto psi = dmap.psi(r, c);
      if (!psi || *psi == 0.0) continue;
      Rgb& p = out(r, c);
      if (*psi > 0.0) {
        p.g = add_clamped(p.g, *psi);
      } else {
        p.r = add_clamped(p.r, -*psi);
      }
    }
  }
}

void paint_boundaries(OverlayImage& out, const DirectionalDefectField& ddmap) {
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      if (ddmap.flag(r, c).value_or(false)) out(r, c) = {255, 255, 0};
    }
  }
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

OverlayImage render_support_overlay(const GrayImage& img, const SupportField& smap) {
  check_size(img, smap);
  OverlayImage out = gray_base(img);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      Rgb& p = out(r, c);
      p.b = add_clamped(p.b, smap.at(r, c));
    }
  }
  return out;
}

OverlayImage render_defect_overlay(const GrayImage& img, const DefectField& dmap) {
  check_size(img, dmap);
  OverlayImage out = gray_base(img);
  paint_defects(out, dmap);
  return out;
}

OverlayImage render_ddmap_overlay(const GrayImage& img,
                                  const DirectionalDefectField& ddmap) {
  check_size(img, ddmap);
  OverlayImage out = gray_base(img);
  paint_boundaries(out, ddmap);
  return out;
}

OverlayImage render_mixed_overlay(const GrayImage& img, const MixedLayers& layers) {
  check_size(img, layers.defects);
  check_size(img, layers.boundaries);
  OverlayImage out = gray_base(img);
  paint_defects(out, layers.defects);
  paint_boundaries(out, layers.boundaries);
  return out;
}

std::vector<std::optional<PolarVertex>> polar_vertices(const AverageCLD& avg,
                                                       int size) {
  double longest = 0.0;
  for (const auto& d : avg.per_direction) {
    if (d.present()) longest = std::max(longest, d.mean());
  }
  if (longest <= 0.0) {
    throw DegenerateError("average diagram has no present direction");
  }
  const int n = avg.directions();
  const double center = size / 2.0;
  const double scale = 0.45 * size / longest;
  std::vector<std::optional<PolarVertex>> out(n);
  for (int k = 1; k <= n; ++k) {
    if (!avg[k].present()) continue;
    const double a = 2.0 * std::numbers::pi * k / n;
    const double rad = avg[k].mean() * scale;
    out[k - 1] = PolarVertex{center + rad * std::cos(a), center - rad * std::sin(a), rad};
  }
  return out;
}

std::string render_polar_svg(const AverageCLD& avg, int size, const PolarLabels& labels) {
  const auto verts = polar_vertices(avg, size);
  const int n = static_cast<int>(verts.size());
  const std::string s = std::to_string(size);
  const double center = size / 2.0;
  const double reach = 0.45 * size;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << s
      << "\" height=\"" << s << "\" viewBox=\"0 0 " << s << ' ' << s << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << s << "\" height=\"" << s
      << "\" fill=\"white\"/>\n";

  // Axes: +x is the image row axis (k = n_d), +y (drawn upwards) the
  // column axis (k = n_d / 4).
  const std::string c = format_number(center);
  svg << "<g stroke=\"#999999\" stroke-width=\"1\">\n"
      << "<line x1=\"" << format_number(center - reach) << "\" y1=\"" << c
      << "\" x2=\"" << format_number(center + reach) << "\" y2=\"" << c << "\"/>\n"
      << "<line x1=\"" << c << "\" y1=\"" << format_number(center - reach)
      << "\" x2=\"" << c << "\" y2=\"" << format_number(center + reach) << "\"/>\n"
      << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << format_number(reach)
      << "\" fill=\"none\" stroke-dasharray=\"4 4\"/>\n"
      << "</g>\n";

  auto point = [](const PolarVertex& v) {
    return format_number(v.x) + "," + format_number(v.y);
  };

  const bool complete = std::all_of(verts.begin(), verts.end(),
                                    [](const auto& v) { return v.has_value(); });
  svg << "<g fill=\"none\" stroke=\"#1f4fbf\" stroke-width=\"2\">\n";
  if (complete) {
    svg << "<polygon points=\"";
    for (int i = 0; i < n; ++i) svg << (i ? " " : "") << point(*verts[i]);
    svg << "\"/>\n";
  } else {
    // Start right after a missing direction so that runs never wrap.
    int start = 0;
    while (verts[start]) ++start;
    std::vector<PolarVertex> run;
    auto flush = [&] {
      if (run.empty()) return;
      if (run.size() == 1) {
        svg << "<circle cx=\"" << format_number(run[0].x) << "\" cy=\""
            << format_number(run[0].y) << "\" r=\"2\" fill=\"#1f4fbf\"/>\n";
      } else {
        svg << "<polyline points=\"";
        for (std::size_t i = 0; i < run.size(); ++i) svg << (i ? " " : "") << point(run[i]);
        svg << "\"/>\n";
      }
      run.clear();
    };
    for (int step = 1; step <= n; ++step) {
      const auto& v = verts[(start + step) % n];
      if (v) {
        run.push_back(*v);
      } else {
        flush();
      }
    }
    flush();
  }
  svg << "</g>\n";

  const std::string fs = format_number(std::max(10.0, size / 40.0));
  svg << "<g font-family=\"sans-serif\" font-size=\"" << fs << "\" fill=\"#333333\">\n"
      << "<text x=\"" << format_number(center + reach) << "\" y=\""
      << format_number(center - 4) << "\" text-anchor=\"end\">+row (k=" << n
      << ")</text>\n"
      << "<text x=\"" << format_number(center + 4) << "\" y=\""
      << format_number(center - reach) << "\">+col (k=" << n / 4 << ")</text>\n"
      << "<text x=\"4\" y=\"" << format_number(size - 6.0) << "\">tau="
      << format_number(labels.tau) << " n_d=" << n
      << " normalization=" << to_string(labels.normalization) << "</text>\n"
      << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace cldmap
