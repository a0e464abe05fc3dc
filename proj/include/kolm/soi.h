#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kolm/bitstring.h"
#include "kolm/codes.h"
#include "kolm/complexity.h"
#include "kolm/report.h"

namespace kolm {

// Information terms of one pair, all under the same bounds (plain mode).
struct InfoProfile {
  BitString x;
  BitString y;
  Complexity t_x;          // C(x | n_x)
  Complexity t_y;          // C(y | x, n_y)
  Complexity t;            // C(xy | n_x, n_y)
  Complexity c_y;          // C(y | n_y)
  Complexity c_x_given_y;  // C(x | y, n_x)
  Complexity c2_x;         // C(C(x | n_x) | n_x)
  Complexity c2_y;         // C(C(y | n_y) | n_y)
  std::optional<int> w;      // t_x + t_y - t
  std::optional<int> i_xy;   // I(x:y) = C(y | n_y) - C(y | x, n_y)
  std::optional<int> i_yx;   // I(y:x) = C(x | n_x) - C(x | y, n_x)
  std::optional<int> delta;  // C2(x | n_x) + C2(y | n_y)
  std::vector<std::string> missing;  // lookups that came back ABOVE_BOUND

  bool complete() const { return missing.empty(); }
};

// Never throws for above-bound lookups; they are listed in `missing`.
InfoProfile try_info_profile(ComplexityEngine& engine, const BitString& x, const BitString& y,
                             const Bounds& bounds);
// Throws Error(kPartialProfile) naming the missing lookups.
InfoProfile info_profile(ComplexityEngine& engine, const BitString& x, const BitString& y,
                         const Bounds& bounds);

// Boolean table of the counting argument at threshold t, with row statistics
// relative to one designated row.
struct CellGrid {
  int n_x = 0;
  int n_y = 0;
  int threshold = 0;
  std::uint64_t row = 0;                           // designated row (x)
  std::vector<std::vector<std::uint64_t>> ones;    // S_u: 1-cell columns per row, ascending
  std::uint64_t total = 0;                         // |S|
  int m = 0;                                       // 2^(m-1) < |S_row| <= 2^m
  std::vector<std::uint64_t> fat;                  // F: rows with more than 2^(m-1) 1-cells
  std::uint64_t fat_at_least = 0;                  // rows with at least 2^(m-1) 1-cells

  bool cell(std::uint64_t u, std::uint64_t v) const;
  bool row_is_fat(std::uint64_t u) const;
};

// Smallest m >= 0 with count <= 2^m (m = 0 for count <= 1).
int bucket_exponent(std::uint64_t count);

// Above-bound cells count as 0-cells.
CellGrid make_cell_grid(const PairGrid& grid, std::uint64_t row, int threshold);
// Grid at t = C(xy | n_x, n_y); throws Error(kThresholdUnavailable) if t is above bound.
CellGrid build_cell_grid(ComplexityEngine& engine, const BitString& x, const BitString& y,
                         const Bounds& bounds);

// Two-part description of (x, y): Lambda, then the rank of x among the fat
// rows on exactly t-m+2 bits (the x-part), then the rank of y in S_x on
// exactly m bits (the y-part). The parts are separate descriptions; the
// x-part length is what lets the decoder recover m.
struct KlCode {
  BitString lambda;
  BitString f_index;
  BitString s_index;
  LambdaRecord record;
  int t = 0;
  int m = 0;

  std::size_t length() const { return lambda.size() + f_index.size() + s_index.size(); }
};

// Requires w > 0 (Error(kNonPositiveDeficiency)) and t_x, t_y, t within
// bounds (Error(kThresholdUnavailable)).
KlCode kl_encode(ComplexityEngine& engine, const BitString& x, const BitString& y,
                 const Bounds& bounds);
// x from (n_x, Lambda, f_index).
BitString kl_decode_row(ComplexityEngine& engine, const BitString& lambda, const BitString& f_index,
                        int n_x, const Bounds& bounds);
// y from (x, Lambda, s_index).
BitString kl_decode_column(ComplexityEngine& engine, const BitString& lambda, const BitString& x,
                           const BitString& s_index, const Bounds& bounds);
std::pair<BitString, BitString> kl_decode(ComplexityEngine& engine, const KlCode& code, int n_x,
                                          const Bounds& bounds);

struct CountingResult {
  int n_x = 0;
  int n_y = 0;
  std::uint64_t pairs_checked = 0;
  std::uint64_t pairs_skipped = 0;  // t above bound
  std::optional<std::uint64_t> min_slack_s;  // min of 2^(t+1) - |S|
  std::optional<std::uint64_t> min_slack_f;  // min of 2^(t-m+2) - |F|
  std::uint64_t variant_differs = 0;         // grids where ">=" fat rows differ from ">"
  std::uint64_t variant_violations = 0;      // ">=" variant breaking |F| < 2^(t-m+2)
  std::vector<std::string> violations;
};

CountingResult verify_counting_bounds(ComplexityEngine& engine, int n_x, int n_y, const Bounds& bounds);
Report to_report(const CountingResult& r, const Bounds& bounds);

struct ChainRuleResult {
  int n = 0;
  std::uint64_t pairs_measured = 0;
  std::uint64_t pairs_skipped = 0;
  std::optional<int> excess;  // B(n)
  BitString argmax_x;
  BitString argmax_y;
  std::optional<int> pin;
  std::vector<std::string> violations;
};

// B(n) = max over pairs of C(xy | n, n) - [C(y | n) + C(x | y, n) + 2 C2(y | n)];
// with a pin, asserts B(n) <= pin.
ChainRuleResult verify_chain_rule_upper(ComplexityEngine& engine, int n, const Bounds& bounds,
                                        std::optional<int> pin = std::nullopt);
Report to_report(const ChainRuleResult& r, const Bounds& bounds);

struct MainTheoremRow {
  InfoProfile profile;
  double bound_term = 0;  // log2(1+I(x:y)) + log2(1+|n_x-n_y|) + delta
  std::size_t code_length = 0;
  std::size_t lambda_length = 0;
  bool round_trip = false;
  bool pass = true;
};

struct MainTheoremResult {
  int n_x = 0;
  int n_y = 0;
  std::vector<MainTheoremRow> rows;  // pairs with w > 0 and a complete profile
  std::uint64_t pairs_total = 0;
  std::uint64_t pairs_nonpositive_w = 0;
  std::uint64_t pairs_partial = 0;
  LinearPin fitted;  // tightest line over this run's rows
  std::optional<LinearPin> pin;
  double lambda_constant = 0;  // max over rows of (w - 2) / lambda
  std::vector<std::string> violations;
};

// w <= a*g + b check plus the exact code checks (round trip, length
// lambda + t + 2, f_index width t-m+2) on every pair with w > 0.
MainTheoremResult verify_main_theorem(ComplexityEngine& engine, int n_x, int n_y, const Bounds& bounds,
                                      std::optional<LinearPin> pin = std::nullopt);
Report to_report(const MainTheoremResult& r, const Bounds& bounds);

struct AsymmetryWitness {
  BitString x;
  BitString y;
  InfoProfile profile;
  int gap = 0;  // i_yx - i_xy
  std::uint64_t candidates = 0;
};

// x = bin(n_y); searches y in {0,1}^n_y for the largest I(y:x) - I(x:y),
// ties broken by the lexicographically first y. Error(kNoWitness) if no
// candidate has both information terms within bounds.
AsymmetryWitness find_asymmetry_witness(ComplexityEngine& engine, int n_y, const Bounds& bounds);
Report to_report(const AsymmetryWitness& w, const Bounds& bounds, std::optional<int> pin);

}  // namespace kolm
