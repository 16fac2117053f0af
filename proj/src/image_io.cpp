#include "cldmap/image_io.hpp"

#include <png.h>

#include <cctype>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace cldmap {
namespace {

struct PngReadState {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
  std::string error;
};

struct PngWriteState {
  std::vector<std::uint8_t>* out = nullptr;
  std::string error;
};

void png_read_from_span(png_structp png, png_bytep data, png_size_t length) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->offset + length > st->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(data, st->bytes.data() + st->offset, length);
  st->offset += length;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* st = static_cast<PngWriteState*>(png_get_io_ptr(png));
  st->out->insert(st->out->end(), data, data + length);
}

void png_flush_noop(png_structp) {}

template <typename State>
void png_on_error(png_structp png, png_const_charp msg) {
  auto* st = static_cast<State*>(png_get_error_ptr(png));
  st->error = msg ? msg : "libpng error";
  png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

std::uint8_t reduce16(unsigned v) { return static_cast<std::uint8_t>(v / 257); }

bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

bool is_pgm(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' &&
         (bytes[1] == '2' || bytes[1] == '5');
}

// Runs `step` with libpng's error handler armed. `step` must only call into
// libpng: a longjmp out of it skips C++ destructors.
template <typename F>
bool png_guarded(png_structp png, F&& step) {
  if (setjmp(png_jmpbuf(png))) return false;
  step();
  return true;
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;

  explicit PngReader(PngReadState* st) {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, st, png_on_error<PngReadState>,
                                 png_on_warning);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw InputError("cannot allocate PNG decoder");
  }
  ~PngReader() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
};

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
  PngReadState st{bytes, 0, {}};
  PngReader rd(&st);
  png_structp png = rd.png;
  png_infop info = rd.info;

  const bool header_ok = png_guarded(png, [&] {
    png_set_read_fn(png, &st, png_read_from_span);
    png_read_info(png, info);
    const int color_type = png_get_color_type(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
      png_set_interlace_handling(png);
    }
    png_read_update_info(png, info);
  });
  if (!header_ok) throw InputError("PNG decode failed: " + st.error);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int channels = png_get_channels(png, info);
  if (width == 0 || height == 0) throw DimensionError("PNG has zero dimension");

  const std::size_t stride = png_get_rowbytes(png, info);
  std::vector<std::uint8_t> raw(stride * height);
  std::vector<png_bytep> rows(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raw.data() + y * stride;
  png_bytepp row_ptrs = rows.data();
  const bool body_ok = png_guarded(png, [&] {
    png_read_image(png, row_ptrs);
    png_read_end(png, nullptr);
  });
  if (!body_ok) throw InputError("PNG decode failed: " + st.error);

  GrayImage out(static_cast<int>(height), static_cast<int>(width));
  const std::size_t bps = depth == 16 ? 2 : 1;
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::uint8_t* row = rows[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      auto sample = [&](int ch) -> std::uint8_t {
        const std::uint8_t* p = row + (x * channels + ch) * bps;
        if (bps == 2) return reduce16((unsigned{p[0]} << 8) | p[1]);
        return p[0];
      };
      // Gray and gray+alpha use the first sample; colour ignores alpha.
      const std::uint8_t v = channels <= 2 ? sample(0) : luma(sample(0), sample(1), sample(2));
      out(static_cast<int>(y), static_cast<int>(x)) = v;
    }
  }
  return out;
}

class PgmReader {
 public:
  explicit PgmReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Header integer; skips whitespace and '#' comments.
  unsigned long next_uint() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
      throw InputError("malformed PGM header");
    }
    unsigned long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 0xFFFFFFFFul) throw InputError("PGM header value overflow");
    }
    return v;
  }

  void skip_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw InputError("malformed PGM header");
    }
    ++pos_;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  const bool binary = bytes[1] == '5';
  PgmReader rd(bytes);
  const unsigned long width = rd.next_uint();
  const unsigned long height = rd.next_uint();
  const unsigned long maxval = rd.next_uint();
  if (width == 0 || height == 0) throw DimensionError("PGM has zero dimension");
  if (maxval == 0 || maxval > 65535) throw InputError("PGM maxval out of range");
  if (width > (1ul << 20) || height > (1ul << 20)) {
    throw DimensionError("PGM dimensions too large");
  }

  // Samples above 8 bits are rescaled to 0..255 by floor(v * 255 / maxval),
  // which equals v / 257 for maxval 65535.
  auto to8 = [maxval](unsigned long v) -> std::uint8_t {
    if (v > maxval) throw InputError("PGM sample exceeds maxval");
    if (maxval <= 255) return static_cast<std::uint8_t>(v);
    return static_cast<std::uint8_t>(v * 255 / maxval);
  };

  GrayImage out(static_cast<int>(height), static_cast<int>(width));
  auto px = out.pixels();
  if (binary) {
    rd.skip_single_space();
    const std::size_t bps = maxval > 255 ? 2 : 1;
    if (bytes.size() - rd.pos() < px.size() * bps) {
      throw InputError("truncated PGM raster");
    }
    const std::uint8_t* p = bytes.data() + rd.pos();
    for (std::size_t i = 0; i < px.size(); ++i) {
      const unsigned long v =
          bps == 2 ? (static_cast<unsigned long>(p[2 * i]) << 8) | p[2 * i + 1] : p[i];
      px[i] = to8(v);
    }
  } else {
    for (auto& v : px) v = to8(rd.next_uint());
  }
  return out;
}

}  // namespace

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  // 0.299 R + 0.587 G + 0.114 B in thousandths; non-negative, so adding one
  // half before truncating rounds half away from zero.
  const unsigned weighted = 299u * r + 587u * g + 114u * b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_pgm(bytes)) return decode_pgm(bytes);
  throw FormatError("unsupported image format (expected PNG or PGM)");
}

GrayImage load_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_image(bytes);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw InputError("cannot read " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("cannot write " + path.string());
}

namespace {

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;

  explicit PngWriter(PngWriteState* st) {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, st, png_on_error<PngWriteState>,
                                  png_on_warning);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw InputError("cannot allocate PNG encoder");
  }
  ~PngWriter() { png_destroy_write_struct(&png, info ? &info : nullptr); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
};

std::vector<std::uint8_t> encode_rows(int width, int height, int color_type,
                                      int channels,
                                      std::span<const std::uint8_t> packed,
                                      std::span<const PngText> text) {
  std::vector<std::uint8_t> out;
  PngWriteState st{&out, {}};
  PngWriter wr(&st);

  std::vector<png_bytep> rows(height);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int y = 0; y < height; ++y) {
    rows[y] = const_cast<png_bytep>(packed.data() + y * stride);
  }
  std::vector<png_text> chunks(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = const_cast<png_charp>(text[i].key.c_str());
    chunks[i].text = const_cast<png_charp>(text[i].value.c_str());
    chunks[i].text_length = text[i].value.size();
  }

  png_structp png = wr.png;
  png_infop info = wr.info;
  png_bytepp row_ptrs = rows.data();
  png_textp text_ptr = chunks.data();
  const int text_count = static_cast<int>(chunks.size());
  const bool ok = png_guarded(png, [&] {
    png_set_write_fn(png, &st, png_write_to_vector, png_flush_noop);
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    if (text_count > 0) png_set_text(png, info, text_ptr, text_count);
    png_write_info(png, info);
    png_write_image(png, row_ptrs);
    png_write_end(png, nullptr);
  });
  if (!ok) throw InputError("PNG encode failed: " + st.error);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const GrayImage& img,
                                     std::span<const PngText> text) {
  return encode_rows(img.width(), img.height(), PNG_COLOR_TYPE_GRAY, 1,
                     img.pixels(), text);
}

std::vector<std::uint8_t> encode_png(const RgbImage& img,
                                     std::span<const PngText> text) {
  std::vector<std::uint8_t> packed;
  packed.reserve(img.size() * 3);
  for (const Rgb& p : img.pixels()) {
    packed.push_back(p.r);
    packed.push_back(p.g);
    packed.push_back(p.b);
  }
  return encode_rows(img.width(), img.height(), PNG_COLOR_TYPE_RGB, 3, packed,
                     text);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

}  // namespace cldmap
