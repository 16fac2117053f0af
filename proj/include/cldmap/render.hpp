#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cldmap/coherence.hpp"
#include "cldmap/image.hpp"
#include "cldmap/maps.hpp"

namespace cldmap {

using OverlayImage = RgbImage;

// Overlays start from the gray source (R = G = B = base) and add colour
// layers on top, clamped to 255. Every function throws DimensionError when
// the layer and the image differ in size.

/// Blue channel += round(255 * phi).
OverlayImage render_support_overlay(const GrayImage& img, const SupportField& smap);

/// Green += round(255 * psi) where psi > 0, red += round(255 * -psi) where
/// psi < 0; zero or undefined pixels stay gray.
OverlayImage render_defect_overlay(const GrayImage& img, const DefectField& dmap);

/// Flagged pixels become pure yellow (255, 255, 0).
OverlayImage render_ddmap_overlay(const GrayImage& img,
                                  const DirectionalDefectField& ddmap);

/// Defect overlay with flagged boundary pixels painted yellow on top.
OverlayImage render_mixed_overlay(const GrayImage& img, const MixedLayers& layers);

struct PolarVertex {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.0;
};

/// Drawing coordinates of the polar diagram vertices, index k - 1 for
/// direction k; nullopt for missing directions. Vertex k sits at
/// k * 360 / n_d degrees counterclockwise from the drawing's +x axis (the
/// image row axis), with the largest mean length at radius 0.45 * size.
std::vector<std::optional<PolarVertex>> polar_vertices(const AverageCLD& avg,
                                                       int size);

struct PolarLabels {
  double tau = 0.0;
  Normalization normalization = Normalization::count;
};

/// SVG 1.1 polar plot of the average diagram. A closed polygon when every
/// direction is present, otherwise one polyline per run of present
/// directions. Throws DegenerateError when every direction is missing.
std::string render_polar_svg(const AverageCLD& avg, int size,
                             const PolarLabels& labels);

/// Shortest decimal that round-trips to `v`; "-0" is written as "0".
std::string format_number(double v);

}  // namespace cldmap
