#include "cldmap/generators.hpp"

#include <charconv>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "cldmap/error.hpp"

namespace cldmap::scenes {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_value(int v, const char* what) {
  if (v < 0 || v > 255) {
    throw ConfigError(std::string(what) + " must lie in 0..255, got " + std::to_string(v));
  }
}

// mt19937 output mapped to [0, n) by modulo; std distributions are
// implementation-defined, this is not.
int draw(std::mt19937& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint32_t>(n));
}

struct DotCenter {
  int row;
  int col;
};

std::vector<DotCenter> dot_centers(const SceneSpec& spec, const Dots& d) {
  std::mt19937 rng(d.seed);
  std::vector<DotCenter> out;
  for (int i = 0; i < d.count; ++i) {
    const int r = draw(rng, spec.height);
    const int c = draw(rng, spec.width);
    out.push_back({r, c});
  }
  return out;
}

void stamp_dots(Image<std::uint8_t>& img, const SceneSpec& spec, const Dots& d,
                std::uint8_t value) {
  for (const auto& ctr : dot_centers(spec, d)) {
    for (int dr = -d.radius; dr <= d.radius; ++dr) {
      for (int dc = -d.radius; dc <= d.radius; ++dc) {
        if (dr * dr + dc * dc > d.radius * d.radius) continue;
        const int r = ctr.row + dr;
        const int c = ctr.col + dc;
        if (img.contains(r, c)) img(r, c) = value;
      }
    }
  }
}

void validate(const SceneSpec& spec) {
  if (spec.height < 1 || spec.width < 1) {
    throw ConfigError("scene size must be positive");
  }
  std::visit(
      Overloaded{
          [](const Constant& c) { check_value(c.value, "value"); },
          [&](const Stripes& s) {
            check_value(s.low, "low");
            check_value(s.high, "high");
            const int span = s.orientation == Orientation::vertical ? spec.width : spec.height;
            if (s.period < 2 || s.period % 2 != 0 || s.period > span) {
              throw ConfigError("stripe period must be even, at least 2 and at most the "
                                "image extent");
            }
          },
          [&](const Chessboard& b) {
            check_value(b.dark, "dark");
            check_value(b.light, "light");
            if (b.cell < 1 || b.cell > spec.height || b.cell > spec.width) {
              throw ConfigError("chessboard cell size must lie in 1..min(height, width)");
            }
            if (b.defect) {
              const int rows = (spec.height + b.cell - 1) / b.cell;
              const int cols = (spec.width + b.cell - 1) / b.cell;
              const auto [dr, dc] = *b.defect;
              if (dr < 0 || dr >= rows || dc < 0 || dc >= cols) {
                throw ConfigError("defect cell lies outside the board");
              }
            }
          },
          [](const Dots& d) {
            check_value(d.background, "background");
            check_value(d.value, "dot value");
            if (d.radius < 0) throw ConfigError("dot radius must be non-negative");
            if (d.count < 0) throw ConfigError("dot count must be non-negative");
          },
          [](const Noise&) {},
      },
      spec.pattern);
}

}  // namespace

GrayImage generate(const SceneSpec& spec) {
  validate(spec);
  GrayImage img(spec.height, spec.width);
  std::visit(
      Overloaded{
          [&](const Constant& c) {
            for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(c.value);
          },
          [&](const Stripes& s) {
            const int half = s.period / 2;
            for (int r = 0; r < spec.height; ++r) {
              for (int c = 0; c < spec.width; ++c) {
                const int pos = s.orientation == Orientation::vertical ? c : r;
                img(r, c) = static_cast<std::uint8_t>(pos % s.period < half ? s.low : s.high);
              }
            }
          },
          [&](const Chessboard& b) {
            for (int r = 0; r < spec.height; ++r) {
              for (int c = 0; c < spec.width; ++c) {
                const int cr = r / b.cell;
                const int cc = c / b.cell;
                bool dark = (cr + cc) % 2 == 0;
                if (b.defect && b.defect->first == cr && b.defect->second == cc) dark = !dark;
                img(r, c) = static_cast<std::uint8_t>(dark ? b.dark : b.light);
              }
            }
          },
          [&](const Dots& d) {
            for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(d.background);
            stamp_dots(img, spec, d, static_cast<std::uint8_t>(d.value));
          },
          [&](const Noise& n) {
            std::mt19937 rng(n.seed);
            for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng() >> 24);
          },
      },
      spec.pattern);
  return img;
}

Image<std::uint8_t> dot_mask(const SceneSpec& spec) {
  const auto* d = std::get_if<Dots>(&spec.pattern);
  if (!d) throw ConfigError("dot mask requested for a scene without dots");
  validate(spec);
  Image<std::uint8_t> mask(spec.height, spec.width, 0);
  stamp_dots(mask, spec, *d, 1);
  return mask;
}

std::string to_string(const SceneSpec& spec) {
  std::ostringstream out;
  const std::string size = "size=" + std::to_string(spec.height) + "x" +
                           std::to_string(spec.width);
  std::visit(
      Overloaded{
          [&](const Constant& c) { out << "constant:" << size << ",value=" << c.value; },
          [&](const Stripes& s) {
            out << "stripes:" << size << ",period=" << s.period << ",low=" << s.low
                << ",high=" << s.high << ",orientation="
                << (s.orientation == Orientation::vertical ? "vertical" : "horizontal");
          },
          [&](const Chessboard& b) {
            out << "chessboard:" << size << ",cell=" << b.cell << ",dark=" << b.dark
                << ",light=" << b.light;
            if (b.defect) out << ",defect=" << b.defect->first << ":" << b.defect->second;
          },
          [&](const Dots& d) {
            out << "dots:" << size << ",background=" << d.background
                << ",value=" << d.value << ",radius=" << d.radius
                << ",count=" << d.count << ",seed=" << d.seed;
          },
          [&](const Noise& n) { out << "noise:" << size << ",seed=" << n.seed; },
      },
      spec.pattern);
  return out.str();
}

namespace {

long parse_long(const std::string& text, const std::string& key) {
  long v = 0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError("scene key '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& text, const std::string& key) {
  const long v = parse_long(text, key);
  if (v < -(1l << 30) || v > (1l << 30)) {
    throw ConfigError("scene key '" + key + "' out of range");
  }
  return static_cast<int>(v);
}

std::pair<int, int> parse_pair(const std::string& text, char sep, const std::string& key) {
  const auto pos = text.find(sep);
  if (pos == std::string::npos) {
    throw ConfigError("scene key '" + key + "' expects A" + sep + "B, got '" + text + "'");
  }
  return {parse_int(text.substr(0, pos), key), parse_int(text.substr(pos + 1), key)};
}

}  // namespace

SceneSpec parse_scene(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::map<std::string, std::string> kv;
  if (colon != std::string::npos) {
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("scene item '" + item + "' lacks '='");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
  }

  SceneSpec spec;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  if (auto s = take("size")) {
    std::tie(spec.height, spec.width) = parse_pair(*s, 'x', "size");
  }

  auto set_int = [&](const std::string& key, int& field) {
    if (auto v = take(key)) field = parse_int(*v, key);
  };

  if (kind == "constant") {
    Constant c;
    set_int("value", c.value);
    spec.pattern = c;
  } else if (kind == "stripes") {
    Stripes s;
    set_int("period", s.period);
    set_int("low", s.low);
    set_int("high", s.high);
    if (auto o = take("orientation")) {
      if (*o == "vertical") {
        s.orientation = Orientation::vertical;
      } else if (*o == "horizontal") {
        s.orientation = Orientation::horizontal;
      } else {
        throw ConfigError("stripe orientation must be vertical or horizontal");
      }
    }
    spec.pattern = s;
  } else if (kind == "chessboard") {
    Chessboard b;
    set_int("cell", b.cell);
    set_int("dark", b.dark);
    set_int("light", b.light);
    if (auto d = take("defect")) b.defect = parse_pair(*d, ':', "defect");
    spec.pattern = b;
  } else if (kind == "dots") {
    Dots d;
    set_int("background", d.background);
    set_int("value", d.value);
    set_int("radius", d.radius);
    set_int("count", d.count);
    if (auto s = take("seed")) d.seed = static_cast<std::uint32_t>(parse_long(*s, "seed"));
    spec.pattern = d;
  } else if (kind == "noise") {
    Noise n;
    if (auto s = take("seed")) n.seed = static_cast<std::uint32_t>(parse_long(*s, "seed"));
    spec.pattern = n;
  } else {
    throw ConfigError("unknown scene kind '" + kind + "'");
  }
  if (!kv.empty()) {
    throw ConfigError("unknown key '" + kv.begin()->first + "' for scene " + kind);
  }
  validate(spec);
  return spec;
}

}  // namespace cldmap::scenes
