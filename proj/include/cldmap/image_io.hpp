#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cldmap/image.hpp"

namespace cldmap {

/// Decodes a PNG or PGM (P2/P5) file into 8-bit grayscale.
///
/// Colour input is reduced with luma weights 0.299/0.587/0.114, rounded
/// half away from zero; alpha is ignored. 16-bit samples are reduced to
/// 8 bits by integer division by 257. Throws InputError for unreadable or
/// truncated data, FormatError for anything that is not PNG or PGM.
GrayImage load_image(const std::filesystem::path& path);
GrayImage decode_image(std::span<const std::uint8_t> bytes);

/// Luma of an 8-bit RGB triple, rounded half away from zero.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Uncompressed tEXt chunk written ahead of the image data.
struct PngText {
  std::string key;
  std::string value;
};

/// 8-bit non-interlaced PNG with fixed compression settings; identical
/// input gives identical bytes.
std::vector<std::uint8_t> encode_png(const GrayImage& img,
                                     std::span<const PngText> text = {});
std::vector<std::uint8_t> encode_png(const RgbImage& img,
                                     std::span<const PngText> text = {});

/// Binary PGM (P5, maxval 255).
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace cldmap
