#include "kolm/lambalgen.h"

#include <algorithm>

#include "kolm/codes.h"
#include "kolm/error.h"

namespace kolm {
namespace {

std::uint64_t pow2(int e) { return std::uint64_t{1} << e; }

void check_n(int n) {
  if (n < 1 || n > kMaxPairHalf) {
    throw Error(Errc::kBoundTooLarge,
                "n must lie in [1, " + std::to_string(kMaxPairHalf) + "] (pairs of 2n bits)");
  }
}

int floor_log2(int d) {
  int l = 0;
  while ((d >> (l + 1)) > 0) ++l;
  return l;
}

bool at_least(const Complexity& c, int threshold) { return !c || *c >= threshold; }

// K(uv | n) for all u, v in {0,1}^n; above-bound cells stay empty.
struct KGrid {
  int n = 0;
  std::vector<Complexity> cells;
  Complexity at(std::uint64_t u, std::uint64_t v) const { return cells[(u << n) | v]; }
};

KGrid k_grid(ComplexityEngine& engine, int n, const Bounds& bounds) {
  check_n(n);
  const auto table = engine.table(BitString::bin(n), Mode::kPrefixFree, bounds);
  KGrid g;
  g.n = n;
  g.cells.reserve(pow2(2 * n));
  for (std::uint64_t uv = 0; uv < pow2(2 * n); ++uv) {
    g.cells.push_back(table->lookup(BitString::fixed_width(uv, 2 * n)));
  }
  return g;
}

// Ascending v with K(uv | n) <= threshold.
std::vector<std::uint64_t> row_set(const KGrid& g, std::uint64_t u, int threshold) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 0; v < pow2(g.n); ++v) {
    const Complexity k = g.at(u, v);
    if (k && *k <= threshold) out.push_back(v);
  }
  return out;
}

// |A| >= 2^(n-d), also for d > n where the bound is a fraction.
bool meets_fat_bound(std::uint64_t size, int n, int d) {
  return d <= n ? size >= pow2(n - d) : size >= 1;
}

DeficiencySets sets_from_grid(const KGrid& g, int d, int offset) {
  DeficiencySets s;
  s.n = g.n;
  s.d = d;
  s.offset = offset;
  const int threshold = 2 * g.n + offset - d;
  for (std::uint64_t u = 0; u < pow2(g.n); ++u) {
    s.A.push_back(row_set(g, u, threshold));
    s.pairs_at_threshold += s.A.back().size();
    if (meets_fat_bound(s.A.back().size(), g.n, d)) s.F.push_back(u);
  }
  return s;
}

std::uint64_t index_value(const BitString& i, int n, int d) {
  if (d > n || static_cast<int>(i.size()) != n - d) {
    throw Error(Errc::kWrongIndexWidth, "index must be exactly n - d bits");
  }
  return i.to_uint();
}

BitString pick(const std::vector<std::uint64_t>& set, std::uint64_t rank, int n) {
  if (rank >= set.size()) {
    throw Error(Errc::kRankOutOfRange,
                "rank " + std::to_string(rank) + " of " + std::to_string(set.size()));
  }
  return BitString::fixed_width(set[rank], static_cast<std::size_t>(n));
}

DeficiencyRow measure(ComplexityEngine& engine, int n, int c, const Bounds& bounds, Mode mode) {
  check_n(n);
  if (c < 0) throw Error(Errc::kInvalidArgument, "c must be >= 0");
  DeficiencyRow row;
  row.c = c;
  const int threshold = n - c;
  const BitString bn = BitString::bin(n);
  const auto joint_table = engine.table(BitString::bin(2 * n), mode, bounds);
  const auto x_table = engine.table(bn, mode, bounds);
  const int unknown_d = 2 * n - bounds.max_len - 1;  // largest D an above-bound pair can have

  for (std::uint64_t u = 0; u < pow2(n); ++u) {
    const BitString x = BitString::fixed_width(u, n);
    if (!at_least(x_table->lookup(x), threshold)) continue;
    ++row.x_qualifying;
    const auto y_table = engine.table(x, mode, bounds);
    std::shared_ptr<const ComplexityTable> y_table_n;
    if (mode == Mode::kPlain) y_table_n = engine.table(pack_condition({x, bn}), mode, bounds);
    for (std::uint64_t v = 0; v < pow2(n); ++v) {
      const BitString y = BitString::fixed_width(v, n);
      const Complexity joint = joint_table->lookup(x + y);
      if (y_table_n && at_least(y_table_n->lookup(y), threshold)) {
        ++row.pairs_qualifying_ny;
        if (joint) row.deficiency_ny = std::max(row.deficiency_ny.value_or(2 * n - *joint), 2 * n - *joint);
      }
      if (!at_least(y_table->lookup(y), threshold)) continue;
      ++row.pairs_qualifying;
      if (!joint) {
        ++row.pairs_above_bound;
        continue;
      }
      const int d = 2 * n - *joint;
      if (!row.deficiency || d > *row.deficiency) {
        row.deficiency = d;
        row.argmax_x = x;
        row.argmax_y = y;
      }
    }
  }
  if (row.pairs_above_bound > 0 && (!row.deficiency || unknown_d > *row.deficiency)) {
    row.inconclusive = true;
  }
  return row;
}

RegressionResult regression(ComplexityEngine& engine, int n, int c_max, const Bounds& bounds,
                            std::optional<LinearPin> pin, Mode mode) {
  RegressionResult r;
  r.mode = mode;
  r.n = n;
  r.pin = pin;
  std::vector<std::pair<double, double>> pts;
  for (int c = 0; c <= c_max; ++c) {
    r.rows.push_back(measure(engine, n, c, bounds, mode));
    const DeficiencyRow& row = r.rows.back();
    const std::string at = "n=" + std::to_string(n) + " c=" + std::to_string(c);
    if (row.inconclusive) r.violations.push_back(at + ": above-bound pairs leave D undetermined");
    if (!row.deficiency) continue;
    pts.emplace_back(c, *row.deficiency);
    if (pin && !pin->holds(c, *row.deficiency)) {
      r.violations.push_back(at + ": D = " + std::to_string(*row.deficiency) + " at " +
                             row.argmax_x.to_string() + row.argmax_y.to_string() +
                             " exceeds pinned a*c + b = " + fmt_double(pin->a * c + pin->b));
    }
  }
  if (!pts.empty()) r.fitted = fit_upper_line(pts);
  return r;
}

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "NA"; }

void add_bounds(Report& r, const Bounds& b) {
  r.add("max_len", b.max_len);
  r.add("fuel", static_cast<std::int64_t>(b.cfg.fuel));
  r.add("output_cap", static_cast<std::int64_t>(b.cfg.output_cap));
  r.add("machine", machine_fingerprint_hex());
}

}  // namespace

std::vector<BitString> plain_random_strings(ComplexityEngine& engine, int n, int c, const Bounds& bounds) {
  if (c < 0) throw Error(Errc::kInvalidArgument, "c must be >= 0");
  if (n > kPairGuard) throw Error(Errc::kBoundTooLarge, "n exceeds the desk guard");
  const auto table = engine.table(BitString::bin(n), Mode::kPlain, bounds);
  std::vector<BitString> out;
  for (std::uint64_t u = 0; u < pow2(n); ++u) {
    BitString x = BitString::fixed_width(u, n);
    if (at_least(table->lookup(x), n - c)) out.push_back(std::move(x));
  }
  return out;
}

int compute_d0(int c, const DecoderCostModel& costs) {
  if (c < 0) throw Error(Errc::kInvalidArgument, "c must be >= 0");
  return std::max(2 * (c + 4 + costs.c1), 2 * (c + 4 + costs.c2));
}

DeficiencyRow measure_theorem2(ComplexityEngine& engine, int n, int c, const Bounds& bounds) {
  return measure(engine, n, c, bounds, Mode::kPlain);
}

DeficiencyRow measure_theorem3(ComplexityEngine& engine, int n, int c, const Bounds& bounds) {
  return measure(engine, n, c, bounds, Mode::kPrefixFree);
}

RegressionResult verify_theorem2(ComplexityEngine& engine, int n, int c_max, const Bounds& bounds,
                                 std::optional<LinearPin> pin) {
  return regression(engine, n, c_max, bounds, pin, Mode::kPlain);
}

RegressionResult verify_theorem3_empirical(ComplexityEngine& engine, int n, int c_max,
                                           const Bounds& bounds, std::optional<LinearPin> pin) {
  return regression(engine, n, c_max, bounds, pin, Mode::kPrefixFree);
}

Report to_report(const RegressionResult& r, const Bounds& bounds) {
  const bool plain = r.mode == Mode::kPlain;
  Report rep;
  rep.name = plain ? "theorem2" : "theorem3-empirical";
  rep.add("n", r.n);
  rep.add("mode", mode_name(r.mode));
  add_bounds(rep, bounds);
  rep.add("fitted_a", r.fitted ? fmt_double(r.fitted->a) : "NA");
  rep.add("fitted_b", r.fitted ? fmt_double(r.fitted->b) : "NA");
  rep.add("pinned_a", r.pin ? fmt_double(r.pin->a) : "NA");
  rep.add("pinned_b", r.pin ? fmt_double(r.pin->b) : "NA");
  rep.columns = {"c", "x_qualifying", "pairs_qualifying", "pairs_above_bound", "D", "argmax",
                 "empty"};
  if (plain) {
    rep.columns.push_back("pairs_qualifying_ny");
    rep.columns.push_back("D_ny");
  }
  for (const auto& row : r.rows) {
    std::vector<std::string> rec = {
        std::to_string(row.c),
        std::to_string(row.x_qualifying),
        std::to_string(row.pairs_qualifying),
        std::to_string(row.pairs_above_bound),
        opt(row.deficiency),
        row.deficiency ? row.argmax_x.to_string() + "|" + row.argmax_y.to_string() : "NA",
        row.empty() ? "yes" : "no"};
    if (plain) {
      rec.push_back(std::to_string(row.pairs_qualifying_ny));
      rec.push_back(opt(row.deficiency_ny));
    }
    rep.records.push_back(std::move(rec));
  }
  for (const auto& v : r.violations) rep.fail(v);
  return rep;
}

bool DeficiencySets::in_f(std::uint64_t u) const { return std::binary_search(F.begin(), F.end(), u); }

DeficiencySets deficiency_sets(ComplexityEngine& engine, int n, int d, const Bounds& bounds,
                               int offset) {
  return sets_from_grid(k_grid(engine, n, bounds), d, offset);
}

int k_overhead(ComplexityEngine& engine, int n, const Bounds& bounds) {
  const KGrid g = k_grid(engine, n, bounds);
  int top = 0;
  for (const auto& k : g.cells) {
    if (!k) throw Error(Errc::kAboveBound, "some K(uv | n) is above bound");
    top = std::max(top, *k);
  }
  return top - 2 * n;
}

BitString p1_decode(ComplexityEngine& engine, const BitString& x, int d, const BitString& i,
                    const Bounds& bounds, int offset) {
  const int n = static_cast<int>(x.size());
  const std::uint64_t rank = index_value(i, n, d);
  const KGrid g = k_grid(engine, n, bounds);
  return pick(row_set(g, x.to_uint(), 2 * n + offset - 2 * d), rank, n);
}

BitString p2_decode(ComplexityEngine& engine, int n, int d, const BitString& i, const Bounds& bounds,
                    int offset) {
  const std::uint64_t rank = index_value(i, n, d);
  return pick(deficiency_sets(engine, n, d, bounds, offset).F, rank, n);
}

StructuralResult verify_theorem3_structure(ComplexityEngine& engine, int n, int c_max,
                                           const Bounds& bounds, const DecoderCostModel& costs,
                                           int offset) {
  if (offset < 0) throw Error(Errc::kInvalidArgument, "offset must be >= 0");
  StructuralResult r;
  r.n = n;
  r.c_max = c_max;
  r.offset = offset;
  r.costs = costs;
  const KGrid g = k_grid(engine, n, bounds);
  const int d_top = 2 * n + offset + 1;

  // Set-level checks.
  std::vector<DeficiencySets> sets;
  for (int d = 0; d <= d_top; ++d) sets.push_back(sets_from_grid(g, d, offset));
  for (int d = 0; d <= d_top; ++d) {
    const DeficiencySets& s = sets[d];
    const std::string at = "d=" + std::to_string(d);
    ++r.counting_checks;
    const int budget = 2 * n + offset - d;  // threshold of the pair count
    const bool lower_ok = d <= n ? (s.F.size() << (n - d)) <= s.pairs_at_threshold
                                 : s.F.size() <= (s.pairs_at_threshold << (d - n));
    if (!lower_ok) r.violations.push_back(at + ": |F(d)| 2^(n-d) exceeds the pair count");
    if (budget >= 0 ? s.pairs_at_threshold >= pow2(budget + 1) : s.pairs_at_threshold > 0) {
      r.violations.push_back(at + ": pair count reaches 2^(2n-d+1)");
    }
    if (s.F.size() >= pow2(n + offset + 1)) {
      r.violations.push_back(at + ": |F(d)| >= 2^(n+offset+1)");
    }
    r.max_f_ratio = std::max(r.max_f_ratio, static_cast<double>(s.F.size()) / pow2(n + offset));

    if (d > 0) {
      const DeficiencySets& wider = sets[d - 1];
      ++r.nesting_checks;
      for (std::uint64_t u = 0; u < pow2(n); ++u) {
        if (!std::includes(wider.A[u].begin(), wider.A[u].end(), s.A[u].begin(), s.A[u].end())) {
          r.violations.push_back(at + ": A_u(d) not inside A_u(d-1) for u=" + std::to_string(u));
        }
      }
      if (!std::includes(wider.F.begin(), wider.F.end(), s.F.begin(), s.F.end())) {
        ++r.f_nesting_breaks;
        for (auto u : s.F) {
          if (wider.in_f(u)) continue;
          r.notes.push_back(at + ": u=" + BitString::fixed_width(u, n).to_string() +
                            " in F(d) but not F(d-1); |A_u(d)|=" + std::to_string(s.A[u].size()) +
                            " |A_u(d-1)|=" + std::to_string(wider.A[u].size()));
        }
      }
    }

    // p2 round trips, and rejection just past the end.
    if (d <= n) {
      for (std::uint64_t k = 0; k < s.F.size() && k < pow2(n - d); ++k) {
        const BitString i = BitString::fixed_width(k, n - d);
        if (p2_decode(engine, n, d, i, bounds, offset) != BitString::fixed_width(s.F[k], n)) {
          r.violations.push_back(at + ": p2 round trip failed at rank " + std::to_string(k));
        }
        ++r.p2_round_trips;
      }
      if (s.F.size() < pow2(n - d)) {
        try {
          p2_decode(engine, n, d, BitString::fixed_width(s.F.size(), n - d), bounds, offset);
          r.violations.push_back(at + ": p2 accepted a rank past the end");
        } catch (const Error& e) {
          if (e.code() != Errc::kRankOutOfRange) throw;
        }
      }
    }
  }

  // p1 round trips over every x and every d with a representable index.
  for (std::uint64_t u = 0; u < pow2(n); ++u) {
    const BitString x = BitString::fixed_width(u, n);
    for (int d = 0; d <= n; ++d) {
      const auto set = row_set(g, u, 2 * n + offset - 2 * d);
      for (std::uint64_t k = 0; k < set.size() && k < pow2(n - d); ++k) {
        if (p1_decode(engine, x, d, BitString::fixed_width(k, n - d), bounds, offset) !=
            BitString::fixed_width(set[k], n)) {
          r.violations.push_back("p1 round trip failed at x=" + x.to_string() + " d=" +
                                 std::to_string(d));
        }
        ++r.p1_round_trips;
      }
    }
  }

  // Case analysis over qualifying pairs.
  const BitString bn = BitString::bin(n);
  const auto x_table = engine.table(bn, Mode::kPrefixFree, bounds);
  for (int c = 0; c <= c_max; ++c) {
    const int d0 = compute_d0(c, costs);
    r.d0.push_back(d0);
    for (std::uint64_t u = 0; u < pow2(n); ++u) {
      const BitString x = BitString::fixed_width(u, n);
      if (!at_least(x_table->lookup(x), n - c)) continue;
      const auto y_table = engine.table(x, Mode::kPrefixFree, bounds);
      for (std::uint64_t v = 0; v < pow2(n); ++v) {
        if (!at_least(y_table->lookup(BitString::fixed_width(v, n)), n - c)) continue;
        for (int d = 1; d <= d0; ++d) {
          ++r.instances;
          const bool accounting = n - d + 2 * floor_log2(d) + 4 + costs.c1 < n - c;
          if (accounting) ++r.accounting_instances;
          const int threshold = 2 * n + offset - 2 * d;
          const Complexity k = g.at(u, v);
          if (!k || *k > threshold) {
            ++r.case_a;
            continue;
          }
          const auto set = row_set(g, u, threshold);
          const auto rank = static_cast<std::uint64_t>(
              std::lower_bound(set.begin(), set.end(), v) - set.begin());
          if (d <= n && rank < pow2(n - d)) {
            ++r.p1_decodable;
            if (accounting) {
              r.violations.push_back("c=" + std::to_string(c) + " d=" + std::to_string(d) +
                                     ": y p1-decodable inside the accounting region");
            }
            continue;
          }
          ++r.case_b;
          const DeficiencySets& s = d <= d_top ? sets[d] : sets.back();
          if (d > d_top || !s.in_f(u)) {
            r.violations.push_back("c=" + std::to_string(c) + " d=" + std::to_string(d) +
                                   ": case (b) with x outside F(d)");
            continue;
          }
          const auto f_rank = static_cast<std::uint64_t>(
              std::lower_bound(s.F.begin(), s.F.end(), u) - s.F.begin());
          if (d > n || f_rank >= pow2(n - d)) {
            ++r.case_b_out_of_width;
            continue;
          }
          if (p2_decode(engine, n, d, BitString::fixed_width(f_rank, n - d), bounds, offset) != x) {
            r.violations.push_back("c=" + std::to_string(c) + " d=" + std::to_string(d) +
                                   ": p2 does not invert x's rank");
          }
          ++r.case_b_round_trips;
        }
      }
    }
  }
  return r;
}

Report to_report(const StructuralResult& r, const Bounds& bounds) {
  Report rep;
  rep.name = "theorem3-structure";
  rep.add("n", r.n);
  rep.add("c_max", r.c_max);
  rep.add("offset", r.offset);
  add_bounds(rep, bounds);
  rep.add("c1", r.costs.c1);
  rep.add("c2", r.costs.c2);
  std::string d0;
  for (int v : r.d0) d0 += (d0.empty() ? "" : ",") + std::to_string(v);
  rep.add("d0_per_c", d0);
  rep.add("instances", static_cast<std::int64_t>(r.instances));
  rep.add("accounting_instances", static_cast<std::int64_t>(r.accounting_instances));
  rep.add("case_a", static_cast<std::int64_t>(r.case_a));
  rep.add("case_b", static_cast<std::int64_t>(r.case_b));
  rep.add("p1_decodable_outside_accounting", static_cast<std::int64_t>(r.p1_decodable));
  rep.add("case_b_round_trips", static_cast<std::int64_t>(r.case_b_round_trips));
  rep.add("case_b_rank_wider_than_n_minus_d", static_cast<std::int64_t>(r.case_b_out_of_width));
  rep.add("nesting_checks", static_cast<std::int64_t>(r.nesting_checks));
  rep.add("F_nesting_breaks", static_cast<std::int64_t>(r.f_nesting_breaks));
  rep.add("counting_checks", static_cast<std::int64_t>(r.counting_checks));
  rep.add("max_F_over_2^(n+offset)", fmt_double(r.max_f_ratio));
  rep.add("p1_round_trips", static_cast<std::int64_t>(r.p1_round_trips));
  rep.add("p2_round_trips", static_cast<std::int64_t>(r.p2_round_trips));
  rep.columns = {"note"};
  for (const auto& n : r.notes) rep.records.push_back({n});
  for (const auto& v : r.violations) rep.fail(v);
  return rep;
}

Report sets_report(const DeficiencySets& s, const Bounds& bounds) {
  Report rep;
  rep.name = "deficiency-sets";
  rep.add("n", s.n);
  rep.add("d", s.d);
  rep.add("offset", s.offset);
  add_bounds(rep, bounds);
  rep.add("threshold", 2 * s.n + s.offset - s.d);
  rep.add("pairs_at_threshold", static_cast<std::int64_t>(s.pairs_at_threshold));
  rep.add("F_size", static_cast<std::int64_t>(s.F.size()));
  rep.columns = {"u", "A_size", "in_F", "A"};
  for (std::uint64_t u = 0; u < s.A.size(); ++u) {
    std::string members;
    for (auto v : s.A[u]) {
      members += (members.empty() ? "" : ";") + BitString::fixed_width(v, s.n).to_string();
    }
    rep.records.push_back({BitString::fixed_width(u, s.n).to_string(), std::to_string(s.A[u].size()),
                           s.in_f(u) ? "1" : "0", members.empty() ? "-" : members});
  }
  return rep;
}

}  // namespace kolm
