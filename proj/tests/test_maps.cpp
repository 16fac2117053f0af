#include <doctest.h>

#include <random>

#include "cldmap/generators.hpp"
#include "cldmap/maps.hpp"
#include "test_support.hpp"

using namespace cldmap;

namespace {

struct Pipeline {
  LocalCLDField field;
  AverageCLD avg;
};

Pipeline run(const scenes::SceneSpec& spec, double tau = 0.3) {
  AnalysisConfig cfg;
  cfg.tau = tau;
  auto field = compute_local_field(scenes::generate(spec), cfg);
  auto avg = average_cld(field);
  return {std::move(field), std::move(avg)};
}

const scenes::SceneSpec kChessboard{64, 64, scenes::Chessboard{8, std::pair{3, 4}}};
const scenes::SceneSpec kDots{64, 64, scenes::Dots{128, 255, 2, 10, 7}};

// Average with the given per-direction means (cardinality 1 each, 0 = missing).
AverageCLD average_of(const std::vector<std::uint64_t>& means) {
  AverageCLD avg;
  for (auto m : means) avg.per_direction.push_back({m, m ? 1u : 0u});
  return avg;
}

}  // namespace

TEST_CASE("support map") {
  const auto flat = compute_local_field(GrayImage(40, 40, 50), AnalysisConfig{});
  const SupportField s = support_map(flat);
  CHECK(s.at(20, 20) == 1.0);
  CHECK(s.at(0, 0) < 1.0);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 40; ++c) {
      REQUIRE(s.defined_count(r, c) >= 0);
      REQUIRE(s.defined_count(r, c) <= 32);
      REQUIRE(s.at(r, c) * 32 == s.defined_count(r, c));
    }
  }
  std::vector<std::uint32_t> half(32, 0);
  for (int k = 0; k < 16; ++k) half[2 * k] = 3;
  CHECK(support_map(testing::uniform_field(2, 2, half)).at(1, 1) == 0.5);
}

TEST_CASE("directional success uses a closed band") {
  CHECK(directional_success(12, 10.0, 0.5));
  CHECK_FALSE(directional_success(16, 10.0, 0.5));
  CHECK(directional_success(5, 10.0, 0.5));
  CHECK(directional_success(15, 10.0, 0.5));
  CHECK_FALSE(directional_success(4, 10.0, 0.5));
}

TEST_CASE("defect map counts conforming directions") {
  std::vector<std::uint64_t> means(32, 10);
  const AverageCLD avg = average_of(means);

  std::vector<std::uint32_t> diag(32, 10);
  for (int k = 0; k < 8; ++k) diag[k] = 30;
  CHECK(defect_map(testing::uniform_field(1, 1, diag), avg, 0.5).psi(0, 0) == 0.5);

  CHECK(defect_map(testing::uniform_field(1, 1, std::vector<std::uint32_t>(32, 11)), avg, 0.5)
            .psi(0, 0) == 1.0);
  CHECK(defect_map(testing::uniform_field(1, 1, std::vector<std::uint32_t>(32, 40)), avg, 0.5)
            .psi(0, 0) == -1.0);
  CHECK_FALSE(defect_map(testing::uniform_field(1, 1, std::vector<std::uint32_t>(32, 0)), avg, 0.5)
                  .psi(0, 0));

  // a locally defined direction without global support is not eligible
  means[0] = 0;
  std::vector<std::uint32_t> lonely(32, 0);
  lonely[0] = 10;
  const auto d = defect_map(testing::uniform_field(1, 1, lonely), average_of(means), 0.5);
  CHECK(d.eligible(0, 0) == 0);
  CHECK_FALSE(d.psi(0, 0));

  CHECK_THROWS_AS(defect_map(testing::uniform_field(1, 1, diag), avg, 0.0), ConfigError);
  CHECK_THROWS_AS(defect_map(testing::uniform_field(1, 1, {1, 1, 1, 1}), avg, 0.5), ConfigError);
}

TEST_CASE("psi is 1 iff every eligible direction conforms") {
  std::mt19937 rng(3);
  std::vector<std::uint64_t> means(32);
  for (auto& m : means) m = 1 + rng() % 20;
  const AverageCLD avg = average_of(means);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::uint32_t> diag(32);
    for (auto& l : diag) l = rng() % 30;
    const auto d = defect_map(testing::uniform_field(1, 1, diag), avg, 0.3);
    if (!d.psi(0, 0)) continue;
    CHECK((*d.psi(0, 0) == 1.0) == (d.conforming(0, 0) == d.eligible(0, 0)));
    CHECK((*d.psi(0, 0) == -1.0) == (d.conforming(0, 0) == 0));
  }
}

TEST_CASE("chessboard defect map statistics") {
  // frozen from tests/oracle/cld_oracle.py
  const Pipeline p = run(kChessboard);
  struct Row {
    double tau_prime, mean_psi;
    int minus_one;
  };
  for (const Row& row : {Row{0.1, -0.8206747835724335, 1328}, Row{0.3, -0.38612769864744945, 260},
                         Row{0.5, -0.06242450136564187, 4}}) {
    CAPTURE(row.tau_prime);
    const auto d = defect_map(p.field, p.avg, row.tau_prime);
    double sum = 0;
    int n = 0;
    int minus = 0;
    for (int r = 0; r < 64; ++r) {
      for (int c = 0; c < 64; ++c) {
        const auto v = d.psi(r, c);
        REQUIRE(v);
        sum += *v;
        ++n;
        minus += *v == -1.0;
      }
    }
    CHECK(sum / n == doctest::Approx(row.mean_psi).epsilon(1e-12));
    CHECK(minus == row.minus_one);
  }
}

TEST_CASE("raw square sum") {
  const AverageCLD avg = average_of(std::vector<std::uint64_t>(4, 3));
  CHECK(raw_square_sum(testing::uniform_field(1, 1, {3, 3, 3, 0}), avg, {0, 0}) == 0.0);
  CHECK(raw_square_sum(testing::uniform_field(1, 1, {3, 0, 0, 0}), average_of({1, 1, 1, 1}),
                       {0, 0}) == 4.0);
  CHECK_THROWS_AS(raw_square_sum(testing::uniform_field(1, 1, {0, 0, 0, 0}), avg, {0, 0}),
                  DegenerateError);

  const Pipeline p = run(kChessboard);
  CHECK(raw_square_sum(p.field, p.avg, {23, 35}) == doctest::Approx(4315.259864117359).epsilon(1e-12));
  CHECK(raw_square_sum(p.field, p.avg, {28, 31}) == doctest::Approx(4117.853885790782).epsilon(1e-12));
}

TEST_CASE("scale and direction-count factors") {
  const AverageCLD avg = average_of({2, 4, 6, 8});
  CHECK(scale_factor(testing::uniform_field(1, 1, {2, 4, 6, 8}), avg, {0, 0}) == 1.0);
  CHECK(scale_factor(testing::uniform_field(1, 1, {4, 8, 12, 16}), avg, {0, 0}) == 0.5);
  // eligible k = 1, 3: (2 + 6) / (5 + 1)
  CHECK(scale_factor(testing::uniform_field(1, 1, {5, 0, 1, 0}), avg, {0, 0}) ==
        doctest::Approx(8.0 / 6.0));

  const AverageCLD full = average_of(std::vector<std::uint64_t>(32, 1));
  std::vector<std::uint32_t> diag(32, 1);
  CHECK(direction_count_factor(testing::uniform_field(1, 1, diag), full, {0, 0}) == 1.0);
  std::fill(diag.begin() + 16, diag.end(), 0);
  CHECK(direction_count_factor(testing::uniform_field(1, 1, diag), full, {0, 0}) == 2.0);
  std::fill(diag.begin() + 1, diag.end(), 0);
  CHECK(direction_count_factor(testing::uniform_field(1, 1, diag), full, {0, 0}) == 32.0);

  const Pipeline p = run({32, 32, scenes::Noise{11}});
  CHECK(scale_factor(p.field, p.avg, {16, 16}) == doctest::Approx(0.7013165013546724).epsilon(1e-12));
}

TEST_CASE("normalized square sum") {
  const AverageCLD avg = average_of({2, 4, 6, 8});
  for (std::uint32_t c : {1u, 2u, 3u, 7u}) {
    CHECK(normalized_square_sum(testing::uniform_field(1, 1, {2 * c, 4 * c, 6 * c, 8 * c}), avg,
                                {0, 0}) == 0.0);
  }
  CHECK(normalized_square_sum(testing::uniform_field(1, 1, {0, 17, 0, 0}), avg, {0, 0}) == 0.0);
  // eligible {1, 2}: rho = 6/4, sigma = 2, terms (3 - 2)^2 + (3 - 4)^2
  CHECK(normalized_square_sum(testing::uniform_field(1, 1, {2, 2, 0, 0}), avg, {0, 0}) ==
        doctest::Approx(4.0));

  // frozen from tests/oracle/cld_oracle.py (rho/sigma form, exact rationals)
  const Pipeline p = run({32, 32, scenes::Noise{11}});
  struct Case {
    int r, c;
    double q;
  };
  for (const Case& k : {Case{0, 0, 93.47307738218282}, Case{5, 9, 39.840334227943195},
                        Case{16, 16, 120.26010031936474}, Case{31, 2, 166.4431866422928},
                        Case{20, 30, 196.944938065827}}) {
    CHECK(normalized_square_sum(p.field, p.avg, {k.r, k.c}) == doctest::Approx(k.q).epsilon(1e-10));
  }
}

TEST_CASE("normalized square sum ignores the size of the local diagram") {
  std::mt19937 rng(21);
  std::vector<std::uint64_t> means(32);
  for (auto& m : means) m = 1 + rng() % 9;
  const AverageCLD avg = average_of(means);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint32_t> diag(32);
    for (auto& l : diag) l = rng() % 12;
    if (std::all_of(diag.begin(), diag.end(), [](auto l) { return l == 0; })) continue;
    const double base = normalized_square_sum(testing::uniform_field(1, 1, diag), avg, {0, 0});
    for (std::uint32_t c : {2u, 5u}) {
      auto scaled = diag;
      for (auto& l : scaled) l *= c;
      CHECK(normalized_square_sum(testing::uniform_field(1, 1, scaled), avg, {0, 0}) ==
            doctest::Approx(base).epsilon(1e-12).scale(1.0));
    }
  }
}

TEST_CASE("directional defect map") {
  SUBCASE("constant image gives a zero field flagged everywhere") {
    const auto f = compute_local_field(GrayImage(32, 32, 77), AnalysisConfig{});
    const auto dd = directional_defect_map(f, average_cld(f), 0.5);
    CHECK(dd.mean_q() == 0.0);
    CHECK(dd.defined_count() == 32 * 32);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) REQUIRE(dd.flag(r, c) == true);
    }
  }
  SUBCASE("band algebra for tau'' >= 1") {
    const Pipeline p = run({32, 32, scenes::Noise{11}});
    const auto dd = directional_defect_map(p.field, p.avg, 1.5);
    CHECK(dd.band_low() < 0.0);
    for (int r = 0; r < 32; ++r) {
      for (int c = 0; c < 32; ++c) {
        REQUIRE(*dd.flag(r, c) == (*dd.q(r, c) <= dd.mean_q() * 2.5));
      }
    }
  }
  SUBCASE("frozen scene statistics") {
    // frozen from tests/oracle/cld_oracle.py
    const Pipeline cb = run(kChessboard);
    const auto dcb = directional_defect_map(cb.field, cb.avg, 0.5);
    CHECK(dcb.mean_q() == doctest::Approx(1608.5407253668543).epsilon(1e-12));
    CHECK(*dcb.q(28, 31) == doctest::Approx(628.4531445422355).epsilon(1e-12));
    int flagged = 0;
    for (int r = 0; r < 64; ++r) {
      for (int c = 0; c < 64; ++c) flagged += dcb.flag(r, c).value_or(false);
    }
    CHECK(flagged == 2855);

    const Pipeline dots = run(kDots);
    const auto dd = directional_defect_map(dots.field, dots.avg, 0.5);
    CHECK(dd.mean_q() == doctest::Approx(5.571685597442057).epsilon(1e-12));
    flagged = 0;
    for (int r = 0; r < 64; ++r) {
      for (int c = 0; c < 64; ++c) flagged += dd.flag(r, c).value_or(false);
    }
    CHECK(flagged == 12);

    const Pipeline st = run({64, 64, scenes::Stripes{8, 100, 150}});
    const auto ds = directional_defect_map(st.field, st.avg, 0.5);
    CHECK(ds.mean_q() == 0.0);
    CHECK(ds.defined_count() == 4096);
  }
  SUBCASE("band membership grows with tau''") {
    const Pipeline p = run(kChessboard);
    const auto narrow = directional_defect_map(p.field, p.avg, 0.2);
    const auto wide = directional_defect_map(p.field, p.avg, 0.6);
    for (int r = 0; r < 64; ++r) {
      for (int c = 0; c < 64; ++c) {
        if (narrow.flag(r, c).value_or(false)) REQUIRE(*wide.flag(r, c));
      }
    }
  }
  SUBCASE("mean over all pixels") {
    LocalCLDField f(2, 2, 4);
    for (int k = 1; k <= 4; ++k) f.at(0, 0, k) = k;
    f.at(0, 1, 1) = 1;
    f.at(0, 1, 2) = 5;
    const AverageCLD avg = average_cld(f);
    const auto defined = directional_defect_map(f, avg, 0.5, QMeanMode::defined_pixels);
    const auto all = directional_defect_map(f, avg, 0.5, QMeanMode::all_pixels);
    CHECK(defined.defined_count() == 2);
    CHECK(defined.mean_q() > 0.0);
    CHECK(all.mean_q() == doctest::Approx(defined.mean_q() * 2 / 4));
    CHECK_FALSE(all.q(1, 1));
  }
  SUBCASE("errors") {
    const LocalCLDField empty(3, 3, 4);
    CHECK_THROWS_AS(directional_defect_map(empty, average_cld(empty), 0.5), DegenerateError);
    const auto f = testing::uniform_field(2, 2, {1, 1, 1, 1});
    CHECK_THROWS_AS(directional_defect_map(f, average_cld(f), 0.0), ConfigError);
  }
}

TEST_CASE("mixed map packages both layers") {
  const Pipeline p = run(kChessboard);
  const auto d = defect_map(p.field, p.avg, 0.3);
  const auto dd = directional_defect_map(p.field, p.avg, 0.5);
  const MixedLayers m = mixed_map(d, dd);
  for (int r = 0; r < 64; r += 7) {
    for (int c = 0; c < 64; c += 5) {
      CHECK(m.defects.psi(r, c) == d.psi(r, c));
      CHECK(m.boundaries.q(r, c) == dd.q(r, c));
      CHECK(m.boundaries.flag(r, c) == dd.flag(r, c));
    }
  }
  const auto small = testing::uniform_field(2, 2, std::vector<std::uint32_t>(32, 1));
  CHECK_THROWS_AS(mixed_map(defect_map(small, average_cld(small), 0.5), dd), DimensionError);
}
