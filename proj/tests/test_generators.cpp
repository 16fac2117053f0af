#include <doctest.h>

#include "cldmap/generators.hpp"

using namespace cldmap;
using namespace cldmap::scenes;

TEST_CASE("constant scene") {
  const GrayImage img = generate({64, 64, Constant{100}});
  for (auto v : img.pixels()) REQUIRE(v == 100);
}

TEST_CASE("chessboard with a flipped cell") {
  const GrayImage plain = generate({64, 64, Chessboard{8, std::nullopt}});
  const GrayImage flawed = generate({64, 64, Chessboard{8, std::pair{3, 4}}});
  CHECK(plain(0, 0) == 0);
  CHECK(plain(0, 8) == 255);
  for (int r = 0; r < 64; ++r) {
    for (int c = 0; c < 64; ++c) {
      const bool in_cell = r / 8 == 3 && c / 8 == 4;
      REQUIRE((flawed(r, c) != plain(r, c)) == in_cell);
    }
  }
  CHECK(flawed(24, 32) == 0);
  CHECK(plain(24, 32) == 255);
}

TEST_CASE("stripes") {
  const GrayImage v = generate({4, 8, Stripes{4, 100, 150, Orientation::vertical}});
  CHECK(v(0, 0) == 100);
  CHECK(v(3, 1) == 100);
  CHECK(v(0, 2) == 150);
  CHECK(v(2, 7) == 150);
  const GrayImage h = generate({8, 4, Stripes{4, 100, 150, Orientation::horizontal}});
  CHECK(h(1, 3) == 100);
  CHECK(h(2, 0) == 150);
}

TEST_CASE("seeded scenes are reproducible and match the reference generator") {
  const SceneSpec dots{64, 64, Dots{128, 255, 2, 10, 7}};
  CHECK(generate(dots) == generate(dots));
  // frozen from the independent mt19937 in tests/oracle/cld_oracle.py
  std::uint64_t sum = 0;
  const GrayImage img = generate(dots);
  for (auto v : img.pixels()) sum += v;
  CHECK(sum == 540798);
  int covered = 0;
  const auto mask = dot_mask(dots);
  for (auto m : mask.pixels()) covered += m;
  CHECK(covered == 130);

  const GrayImage noise = generate({32, 32, Noise{11}});
  const std::vector<int> first{46, 17, 4, 170, 118, 49, 185, 237};
  for (int c = 0; c < 8; ++c) CHECK(noise(0, c) == first[c]);

  CHECK_THROWS_AS(dot_mask({8, 8, Constant{1}}), ConfigError);
}

TEST_CASE("invalid geometry") {
  CHECK_THROWS_AS(generate({8, 8, Chessboard{9, std::nullopt}}), ConfigError);
  CHECK_THROWS_AS(generate({8, 8, Chessboard{0, std::nullopt}}), ConfigError);
  CHECK_THROWS_AS(generate({64, 64, Chessboard{8, std::pair{8, 0}}}), ConfigError);
  CHECK_THROWS_AS(generate({8, 8, Stripes{3, 0, 255}}), ConfigError);
  CHECK_THROWS_AS(generate({8, 8, Stripes{10, 0, 255}}), ConfigError);
  CHECK_THROWS_AS(generate({8, 8, Constant{256}}), ConfigError);
  CHECK_THROWS_AS(generate({0, 8, Constant{1}}), ConfigError);
}

TEST_CASE("scene text form") {
  for (const SceneSpec& s : {SceneSpec{32, 64, Chessboard{8, std::pair{3, 4}}},
                             SceneSpec{10, 20, Dots{128, 255, 2, 10, 7}},
                             SceneSpec{16, 16, Stripes{8, 100, 150, Orientation::horizontal}},
                             SceneSpec{5, 5, Constant{9}}, SceneSpec{3, 4, Noise{99}}}) {
    const std::string text = to_string(s);
    CAPTURE(text);
    CHECK(to_string(parse_scene(text)) == text);
    CHECK(generate(parse_scene(text)) == generate(s));
  }
  CHECK(to_string(parse_scene("chessboard:size=64x64,cell=8,defect=3:4")) ==
        "chessboard:size=64x64,cell=8,dark=0,light=255,defect=3:4");
  CHECK_THROWS_AS(parse_scene("spiral:size=8x8"), ConfigError);
  CHECK_THROWS_AS(parse_scene("constant:size=8x8,colour=3"), ConfigError);
  CHECK_THROWS_AS(parse_scene("constant:size=8by8"), ConfigError);
  CHECK_THROWS_AS(parse_scene("chessboard:size=8x8,cell=x"), ConfigError);
}
