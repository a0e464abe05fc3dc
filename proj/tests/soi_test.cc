#include <doctest.h>

#include <algorithm>
#include <map>

#include "fixtures.h"
#include "kolm/soi.h"

using kolm::BitString;
using kolm::Bounds;
using kolm::Errc;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const kolm::Error& e) {
    return e.code();
  }
  FAIL("expected kolm::Error");
  return Errc::kInvalidArgument;
}

BitString bits(std::uint64_t v, int n) { return BitString::fixed_width(v, static_cast<std::size_t>(n)); }

// One engine for the whole binary; tables are memoized.
kolm::ComplexityEngine& engine() {
  static kolm::ComplexityEngine e;
  return e;
}

const Bounds kN3{16, {}};
const Bounds kN4{20, {}};

}  // namespace

TEST_CASE("profiles agree with the naive-enumerator fixture at n = 3") {
  const auto rows = kolm::fixtures::read_rows("profiles_n3_L16.txt");
  REQUIRE(rows.size() == 64);
  for (const auto& r : rows) {
    const auto p = kolm::try_info_profile(engine(), BitString(r[0]), BitString(r[1]), kN3);
    using kolm::fixtures::value;
    REQUIRE(p.t_x == value(r[2]));
    REQUIRE(p.t_y == value(r[3]));
    REQUIRE(p.t == value(r[4]));
    REQUIRE(p.c_y == value(r[5]));
    REQUIRE(p.c_x_given_y == value(r[6]));
    REQUIRE(p.c2_x == value(r[7]));
    REQUIRE(p.c2_y == value(r[8]));
    REQUIRE(p.complete());
    CHECK(*p.w == *value(r[2]) + *value(r[3]) - *value(r[4]));
    CHECK(*p.i_xy == *value(r[5]) - *value(r[3]));
    CHECK(*p.i_yx == *value(r[2]) - *value(r[6]));
    CHECK(*p.delta == *value(r[7]) + *value(r[8]));
  }
}

TEST_CASE("information terms stay in [-L, L]") {
  for (std::uint64_t u = 0; u < 8; ++u) {
    for (std::uint64_t v = 0; v < 8; ++v) {
      const auto p = kolm::info_profile(engine(), bits(u, 3), bits(v, 3), kN3);
      CHECK(std::abs(*p.i_xy) <= kN3.max_len);
      CHECK(std::abs(*p.i_yx) <= kN3.max_len);
    }
  }
  // Same-length strings: I(x:y) is built from the same lookups as I(y:x) of
  // the swapped pair.
  const auto a = kolm::info_profile(engine(), BitString("011"), BitString("100"), kN3);
  const auto b = kolm::info_profile(engine(), BitString("100"), BitString("011"), kN3);
  CHECK(a.i_xy == b.i_yx);
  CHECK(a.i_yx == b.i_xy);
}

TEST_CASE("partial profiles name their missing lookups") {
  const Bounds tight{12, {}};
  const auto p = kolm::try_info_profile(engine(), BitString("0110"), BitString("1001"), tight);
  CHECK_FALSE(p.complete());
  CHECK(std::find(p.missing.begin(), p.missing.end(), "C(xy|n_x,n_y)") != p.missing.end());
  CHECK_FALSE(p.w.has_value());
  CHECK(error_of([&] { kolm::info_profile(engine(), BitString("0110"), BitString("1001"), tight); }) ==
        Errc::kPartialProfile);
}

TEST_CASE("bucket exponent") {
  CHECK(kolm::bucket_exponent(0) == 0);
  CHECK(kolm::bucket_exponent(1) == 0);
  CHECK(kolm::bucket_exponent(2) == 1);
  CHECK(kolm::bucket_exponent(3) == 2);
  CHECK(kolm::bucket_exponent(4) == 2);
  CHECK(kolm::bucket_exponent(5) == 3);
  CHECK(kolm::bucket_exponent(1024) == 10);
}

TEST_CASE("one 1-cell per row gives m = 0 and every occupied row is fat") {
  kolm::PairGrid grid{2, 2, std::vector<kolm::Complexity>(16)};
  for (std::size_t u = 0; u < 3; ++u) grid.cells[u * 4 + u] = 5;  // row 3 stays empty
  const auto g = kolm::make_cell_grid(grid, 1, 5);
  CHECK(g.m == 0);
  CHECK(g.fat == std::vector<std::uint64_t>{0, 1, 2});
  CHECK(g.total == 3);
  CHECK(g.fat_at_least == 3);
}

TEST_CASE("cell grids match the fixture grid at n = 4, L = 18") {
  const auto rows = kolm::fixtures::read_rows("pair_grid_n4_L18.txt");
  REQUIRE(rows.size() == 256);
  std::vector<kolm::Complexity> cells;
  for (const auto& r : rows) cells.push_back(kolm::fixtures::value(r[1]));

  const auto grid = engine().pair_grid(4, 4, kolm::Mode::kPlain, {18, {}});
  REQUIRE(grid.cells == cells);

  for (std::uint64_t x = 0; x < 16; ++x) {
    for (std::uint64_t y = 0; y < 16; ++y) {
      const auto t = cells[x * 16 + y];
      if (!t) continue;
      // Row counts straight from the fixture.
      std::vector<std::uint64_t> count(16, 0);
      std::uint64_t total = 0;
      for (std::uint64_t u = 0; u < 16; ++u) {
        for (std::uint64_t v = 0; v < 16; ++v) {
          if (cells[u * 16 + v] && *cells[u * 16 + v] <= *t) ++count[u], ++total;
        }
      }
      int m = 0;
      while ((1u << m) < count[x]) ++m;
      std::vector<std::uint64_t> fat;
      for (std::uint64_t u = 0; u < 16; ++u) {
        if (2 * count[u] > (1u << m)) fat.push_back(u);
      }

      const auto g = kolm::build_cell_grid(engine(), bits(x, 4), bits(y, 4), {18, {}});
      REQUIRE(g.threshold == *t);
      REQUIRE(g.total == total);
      REQUIRE(g.m == m);
      REQUIRE(g.fat == fat);
      CHECK(total < (std::uint64_t{1} << (*t + 1)));
      CHECK(fat.size() < (std::uint64_t{1} << (*t - m + 2)));
      CHECK(g.row_is_fat(x));
      CHECK(g.cell(x, y));
    }
  }
  CHECK(error_of([] { kolm::build_cell_grid(engine(), BitString("0000"), BitString("0010"), {18, {}}); }) ==
        Errc::kThresholdUnavailable);
}

TEST_CASE("counting bounds hold with slack at n = 3 and n = 4") {
  for (auto [n, b] : {std::pair{3, Bounds{16, {}}}, std::pair{4, Bounds{18, {}}}, std::pair{4, kN4}}) {
    const auto r = kolm::verify_counting_bounds(engine(), n, n, b);
    CHECK(r.violations.empty());
    CHECK(r.pairs_checked + r.pairs_skipped == (std::uint64_t{1} << (2 * n)));
    CHECK(r.pairs_checked > 0);
    CHECK(*r.min_slack_s >= 1);
    CHECK(*r.min_slack_f >= 1);
    CHECK(to_report(r, b).passed());
  }
}

TEST_CASE("two-part code round trips on every pair with w > 0") {
  for (auto [n, b] : {std::pair{3, kN3}, std::pair{4, kN4}}) {
    std::uint64_t coded = 0;
    for (std::uint64_t u = 0; u < (1u << n); ++u) {
      for (std::uint64_t v = 0; v < (1u << n); ++v) {
        const BitString x = bits(u, n), y = bits(v, n);
        const auto p = kolm::info_profile(engine(), x, y, b);
        if (*p.w <= 0) {
          CHECK(error_of([&] { kolm::kl_encode(engine(), x, y, b); }) == Errc::kNonPositiveDeficiency);
          continue;
        }
        const auto code = kolm::kl_encode(engine(), x, y, b);
        REQUIRE(kolm::kl_decode(engine(), code, n, b) == std::pair{x, y});
        CHECK(code.length() == code.lambda.size() + static_cast<std::size_t>(*p.t) + 2);
        CHECK(static_cast<int>(code.f_index.size()) == *p.t - code.m + 2);
        CHECK(static_cast<int>(code.s_index.size()) == code.m);
        CHECK(code.lambda == kolm::encode_lambda({0, static_cast<std::uint64_t>(*p.t_x),
                                                  static_cast<std::uint64_t>(*p.t_y),
                                                  static_cast<std::uint64_t>(*p.w), false}));
        ++coded;
      }
    }
    CHECK(coded > 0);
  }
}

TEST_CASE("two-part code across unequal lengths") {
  const Bounds b{20, {}};
  for (auto [x, y] : {std::pair{"001", "11000"}, std::pair{"11000", "001"}, std::pair{"1", "0110"}}) {
    const auto p = kolm::info_profile(engine(), BitString(x), BitString(y), b);
    if (*p.w <= 0) continue;
    const auto code = kolm::kl_encode(engine(), BitString(x), BitString(y), b);
    CHECK(code.record.b == (std::string(x).size() > std::string(y).size()));
    CHECK(kolm::kl_decode(engine(), code, static_cast<int>(std::string(x).size()), b) ==
          std::pair{BitString(x), BitString(y)});
  }
}

TEST_CASE("flipping one f_index bit never decodes back to x") {
  for (std::uint64_t u = 0; u < 8; ++u) {
    for (std::uint64_t v = 0; v < 8; ++v) {
      const BitString x = bits(u, 3), y = bits(v, 3);
      const auto code = kolm::kl_encode(engine(), x, y, kN3);
      for (std::size_t i = 0; i < code.f_index.size(); ++i) {
        BitString flipped;
        for (std::size_t j = 0; j < code.f_index.size(); ++j) flipped.push_back(code.f_index[j] != (i == j));
        std::optional<BitString> row;
        std::optional<Errc> err;
        try {
          row = kolm::kl_decode_row(engine(), code.lambda, flipped, 3, kN3);
        } catch (const kolm::Error& e) {
          err = e.code();
        }
        if (row) CHECK(*row != x);
        else CHECK(err == Errc::kRankOutOfRange);
      }
    }
  }
}

TEST_CASE("decoder input errors") {
  CHECK(error_of([] { kolm::kl_decode_row(engine(), BitString(""), BitString("0"), 3, kN3); }) ==
        Errc::kMalformedInput);
  const auto code = kolm::kl_encode(engine(), BitString("010"), BitString("011"), kN3);
  CHECK(error_of([&] {
          kolm::kl_decode_row(engine(), code.lambda + BitString("1"), code.f_index, 3, kN3);
        }) == Errc::kMalformedInput);
  CHECK(error_of([&] {
          kolm::kl_decode_column(engine(), code.lambda, BitString("010"), code.s_index + BitString("0"), kN3);
        }) == Errc::kMalformedInput);
  // A record claiming |x| < |y| by more than it can be.
  CHECK(error_of([&] {
          kolm::kl_decode_row(engine(), kolm::encode_lambda({5, 3, 3, 1, true}), BitString("0"), 3, kN3);
        }) == Errc::kMalformedInput);
}

TEST_CASE("chain-rule excess at n = 3 matches the fixture arithmetic") {
  // B(3) recomputed from the naive profiles: C(xy|3,3) - C(y|3) - C(x|y,3) - 2 C2(y|3).
  std::optional<int> expected;
  for (const auto& r : kolm::fixtures::read_rows("profiles_n3_L16.txt")) {
    using kolm::fixtures::value;
    const int excess = *value(r[4]) - *value(r[5]) - *value(r[6]) - 2 * *value(r[8]);
    expected = std::max(expected.value_or(excess), excess);
  }
  const auto r = kolm::verify_chain_rule_upper(engine(), 3, kN3);
  CHECK(r.excess == expected);
  CHECK(r.excess == -29);
  CHECK(r.pairs_measured == 64);
  CHECK(kolm::verify_chain_rule_upper(engine(), 3, kN3, -29).violations.empty());
  CHECK(kolm::verify_chain_rule_upper(engine(), 3, kN3, -30).violations.size() == 1);

  // Identity pairs: C(x | x, n) is tiny, so the slack is large.
  for (std::uint64_t u = 0; u < 8; ++u) {
    const BitString x = bits(u, 3);
    const auto t = engine().complexity_of(x + x, {BitString::bin(3), BitString::bin(3)}, kolm::Mode::kPlain, kN3);
    const auto cy = engine().complexity_of(x, {BitString::bin(3)}, kolm::Mode::kPlain, kN3);
    const auto cxy = engine().complexity_of(x, {x, BitString::bin(3)}, kolm::Mode::kPlain, kN3);
    const auto c2 = engine().complexity_of(BitString::bin(*cy), {BitString::bin(3)}, kolm::Mode::kPlain, kN3);
    CHECK(*cy + *cxy + 2 * *c2 - *t >= 20);
  }
}

TEST_CASE("main theorem sweep at n = 3") {
  const auto r = kolm::verify_main_theorem(engine(), 3, 3, kN3);
  CHECK(r.pairs_total == 64);
  CHECK(r.pairs_partial == 0);
  CHECK(r.rows.size() + r.pairs_nonpositive_w == 64);
  CHECK(r.violations.empty());
  // Tightest line over the n = 3 sample.
  CHECK(r.fitted.a == doctest::Approx(0));
  CHECK(r.fitted.b == doctest::Approx(9));
  for (const auto& row : r.rows) {
    CHECK(row.round_trip);
    CHECK(r.fitted.holds(row.bound_term, *row.profile.w));
  }
  const auto rep = to_report(r, kN3);
  CHECK(rep.records.size() == r.rows.size());
  CHECK(rep.columns == std::vector<std::string>{"x", "y", "t_x", "t_y", "t", "w", "i_xy", "i_yx", "delta",
                                                "bound_term", "pass"});
}

TEST_CASE("a pin fails exactly on the rows above the line") {
  const kolm::LinearPin pin{0, 9};
  const auto r = kolm::verify_main_theorem(engine(), 4, 4, kN4, pin);
  std::size_t above = 0;
  for (const auto& row : r.rows) above += *row.profile.w > 9 ? 1 : 0;
  CHECK(r.violations.size() == above);
  CHECK(std::count_if(r.rows.begin(), r.rows.end(), [](const auto& row) { return !row.pass; }) ==
        static_cast<long>(above));
}

TEST_CASE("asymmetry witness at n_y = 6") {
  const Bounds b{21, {}};
  const auto w = kolm::find_asymmetry_witness(engine(), 6, b);
  CHECK(w.x == BitString("110"));
  CHECK(w.candidates == 64);
  CHECK(w.gap == 6);
  CHECK(w.y == BitString("110110"));
  // Argmax with the lexicographic tie-break, checked against every candidate.
  for (std::uint64_t v = 0; v < 64; ++v) {
    const auto p = kolm::try_info_profile(engine(), w.x, bits(v, 6), b);
    const int gap = *p.i_yx - *p.i_xy;
    CHECK(gap <= w.gap);
    if (bits(v, 6) < w.y) CHECK(gap < w.gap);
  }
  const auto again = kolm::find_asymmetry_witness(engine(), 6, b);
  CHECK(again.y == w.y);
  CHECK(render_structured(to_report(again, b, 6)) == render_structured(to_report(w, b, 6)));
  CHECK_FALSE(to_report(w, b, 7).passed());
  CHECK(error_of([] { kolm::find_asymmetry_witness(engine(), 14, {21, {}}); }) == Errc::kBoundTooLarge);
}
