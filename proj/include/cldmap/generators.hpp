#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "cldmap/image.hpp"

namespace cldmap::scenes {

enum class Orientation { vertical, horizontal };

struct Constant {
  int value = 128;
};

/// Alternating bands, `period` pixels per low+high pair. Vertical stripes
/// vary along the columns.
struct Stripes {
  int period = 8;
  int low = 100;
  int high = 150;
  Orientation orientation = Orientation::vertical;
};

/// Square cells of `cell` pixels, dark (0) where cell row + cell column is
/// even and light (255) otherwise. `defect` names a zero-based (cell row,
/// cell column) whose colour is flipped.
struct Chessboard {
  int cell = 8;
  std::optional<std::pair<int, int>> defect;
  int dark = 0;
  int light = 255;
};

/// `count` filled disks of radius `radius` on a uniform background; centres
/// drawn from mt19937 seeded with `seed`.
struct Dots {
  int background = 128;
  int value = 255;
  int radius = 2;
  int count = 10;
  std::uint32_t seed = 7;
};

/// Independent uniform values in 0..255 from mt19937 seeded with `seed`.
struct Noise {
  std::uint32_t seed = 1;
};

using Pattern = std::variant<Constant, Stripes, Chessboard, Dots, Noise>;

struct SceneSpec {
  int height = 64;
  int width = 64;
  Pattern pattern;
};

/// Deterministic rendering of a scene. Throws ConfigError for invalid
/// geometry (cell or period larger than the image, defect outside the
/// board, values outside 0..255).
GrayImage generate(const SceneSpec& spec);

/// Canonical text form, e.g. "chessboard:size=64x64,cell=8,defect=3:4".
std::string to_string(const SceneSpec& spec);
/// Inverse of to_string; unspecified keys take their defaults. Throws
/// ConfigError on malformed text.
SceneSpec parse_scene(const std::string& text);

/// Pixels covered by dots in a Dots scene (1 = dot).
Image<std::uint8_t> dot_mask(const SceneSpec& spec);

}  // namespace cldmap::scenes
