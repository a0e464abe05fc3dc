#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kolm/bitstring.h"
#include "kolm/complexity.h"
#include "kolm/report.h"

namespace kolm {

// Accounting lengths of the two meta-level decoders. They are configuration,
// not programs of the machine.
struct DecoderCostModel {
  int c1 = 10;
  int c2 = 12;
};

// Largest n accepted by the sweeps here (pairs xy of 2n bits).
constexpr int kMaxPairHalf = kPairGuard / 2;

// All x in {0,1}^n with C(x | n) >= n - c, ascending. Above-bound strings
// qualify. Error(kInvalidArgument) for c < 0.
std::vector<BitString> plain_random_strings(ComplexityEngine& engine, int n, int c, const Bounds& bounds);

// max(2(c+4+c1), 2(c+4+c2)).
int compute_d0(int c, const DecoderCostModel& costs);

// D = max(2n - C(xy | 2n)) over the pairs meeting both hypotheses at one c.
struct DeficiencyRow {
  int c = 0;
  std::uint64_t x_qualifying = 0;
  std::uint64_t pairs_qualifying = 0;
  std::uint64_t pairs_above_bound = 0;  // C(xy | 2n) above bound: D unknown but <= 2n - L - 1
  std::optional<int> deficiency;
  BitString argmax_x;
  BitString argmax_y;
  bool inconclusive = false;  // an above-bound pair could exceed the measured D
  // Plain only: the same measurement with C(y | x, n) as the second hypothesis.
  std::uint64_t pairs_qualifying_ny = 0;
  std::optional<int> deficiency_ny;

  bool empty() const { return pairs_qualifying == 0; }
};

DeficiencyRow measure_theorem2(ComplexityEngine& engine, int n, int c, const Bounds& bounds);
DeficiencyRow measure_theorem3(ComplexityEngine& engine, int n, int c, const Bounds& bounds);

struct RegressionResult {
  Mode mode = Mode::kPlain;
  int n = 0;
  std::vector<DeficiencyRow> rows;  // c = 0 .. c_max
  std::optional<LinearPin> fitted;  // over non-empty rows, D <= a*c + b
  std::optional<LinearPin> pin;
  std::vector<std::string> violations;
};

// Sweeps c = 0..c_max. With a pin, every conclusive non-empty row must
// satisfy it; empty rows are reported only.
RegressionResult verify_theorem2(ComplexityEngine& engine, int n, int c_max, const Bounds& bounds,
                                 std::optional<LinearPin> pin = std::nullopt);
RegressionResult verify_theorem3_empirical(ComplexityEngine& engine, int n, int c_max,
                                           const Bounds& bounds,
                                           std::optional<LinearPin> pin = std::nullopt);
Report to_report(const RegressionResult& r, const Bounds& bounds);

// A_u(d) = {v : K(uv | n) <= 2n + offset - d} and F(d) = {u : |A_u(d)| >= 2^(n-d)},
// rows and members ascending. offset = 0 is the literal definition; at desk
// scale every K(uv | n) exceeds 2n, so a positive offset (the machine's
// overhead, see k_overhead) is what populates the sets.
struct DeficiencySets {
  int n = 0;
  int d = 0;
  int offset = 0;
  std::vector<std::vector<std::uint64_t>> A;
  std::vector<std::uint64_t> F;
  std::uint64_t pairs_at_threshold = 0;  // |{(u,v) : K(uv | n) <= 2n + offset - d}|

  bool in_f(std::uint64_t u) const;
};

DeficiencySets deficiency_sets(ComplexityEngine& engine, int n, int d, const Bounds& bounds,
                               int offset = 0);

// max over uv in {0,1}^2n of K(uv | n) - 2n; Error(kAboveBound) if some
// K(uv | n) is above bound.
int k_overhead(ComplexityEngine& engine, int n, const Bounds& bounds);

// i-th u (ascending) with K(xu | n) <= 2n + offset - 2d, n = |x|; i must be
// exactly n - d bits (Error(kWrongIndexWidth)), Error(kRankOutOfRange) past the end.
BitString p1_decode(ComplexityEngine& engine, const BitString& x, int d, const BitString& i,
                    const Bounds& bounds, int offset = 0);
// i-th element of F(d), same index rules.
BitString p2_decode(ComplexityEngine& engine, int n, int d, const BitString& i, const Bounds& bounds,
                    int offset = 0);

struct StructuralResult {
  int n = 0;
  int c_max = 0;
  int offset = 0;
  DecoderCostModel costs;
  std::vector<int> d0;  // per c
  // Case analysis over qualifying pairs and d = 1..d0(c).
  std::uint64_t instances = 0;
  std::uint64_t accounting_instances = 0;  // n - d + 2 floor(log d) + 4 + c1 < n - c
  std::uint64_t case_a = 0;                // K(xy | n) > 2n + offset - 2d
  std::uint64_t case_b = 0;                // y ranked at or past 2^(n-d) in A_x(2d)
  std::uint64_t p1_decodable = 0;          // neither; only allowed outside the accounting region
  std::uint64_t case_b_out_of_width = 0;   // x's rank in F(d) needs more than n-d bits
  std::uint64_t case_b_round_trips = 0;
  // Set-level checks over d = 0..2n+offset+1.
  std::uint64_t nesting_checks = 0;
  std::uint64_t f_nesting_breaks = 0;  // F(d+1) not inside F(d); reported only
  std::uint64_t counting_checks = 0;
  double max_f_ratio = 0;  // max over d of |F(d)| / 2^(n+offset) (< 2 by counting)
  std::uint64_t p1_round_trips = 0;
  std::uint64_t p2_round_trips = 0;
  std::vector<std::string> notes;  // F nesting counterexamples
  std::vector<std::string> violations;
};

StructuralResult verify_theorem3_structure(ComplexityEngine& engine, int n, int c_max,
                                           const Bounds& bounds, const DecoderCostModel& costs = {},
                                           int offset = 0);
Report to_report(const StructuralResult& r, const Bounds& bounds);

// Report of the sets at one (n, d): one record per u.
Report sets_report(const DeficiencySets& s, const Bounds& bounds);

}  // namespace kolm
