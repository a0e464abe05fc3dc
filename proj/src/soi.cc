#include "kolm/soi.h"

#include <algorithm>
#include <cstdlib>

namespace kolm {
namespace {

constexpr Mode kPlain = Mode::kPlain;

std::uint64_t pow2(int e) { return std::uint64_t{1} << e; }

[[noreturn]] void malformed(const std::string& why) { throw Error(Errc::kMalformedInput, why); }

struct ParsedLambda {
  LambdaRecord record;
  int n_y = 0;
  int t = 0;
};

// Decodes a standalone Lambda and derives n_y and t from it.
ParsedLambda parse_lambda(const BitString& lambda, int n_x, const Bounds& bounds) {
  if (lambda.empty()) malformed("empty Lambda");
  LambdaDecoded d;
  try {
    d = decode_lambda(lambda);
  } catch (const Error& e) {
    malformed(std::string("Lambda does not decode: ") + e.what());
  }
  if (d.consumed != lambda.size()) malformed("bits after the Lambda record");
  const LambdaRecord& r = d.record;
  if (r.w == 0) malformed("Lambda carries w = 0");
  if (r.b && (r.delta_n == 0 || r.delta_n > static_cast<std::uint64_t>(n_x))) {
    malformed("Lambda length difference inconsistent with n_x");
  }
  if (r.delta_n > static_cast<std::uint64_t>(kPairGuard) || r.t_x > 4096 || r.t_y > 4096 ||
      r.w > 8192) {
    malformed("Lambda field out of range");
  }
  ParsedLambda out;
  out.record = r;
  out.n_y = r.b ? n_x - static_cast<int>(r.delta_n) : n_x + static_cast<int>(r.delta_n);
  const std::int64_t t = static_cast<std::int64_t>(r.t_x) + static_cast<std::int64_t>(r.t_y) -
                         static_cast<std::int64_t>(r.w);
  if (t < 0 || t > bounds.max_len) malformed("threshold t outside [0, L]");
  out.t = static_cast<int>(t);
  return out;
}

std::vector<std::uint64_t> row_counts(const PairGrid& grid, int threshold) {
  std::vector<std::uint64_t> counts(grid.rows(), 0);
  for (std::size_t u = 0; u < grid.rows(); ++u) {
    for (std::size_t v = 0; v < grid.cols(); ++v) {
      const Complexity c = grid.at(u, v);
      if (c && *c <= threshold) ++counts[u];
    }
  }
  return counts;
}

// Rows with more than 2^(m-1) ones: 2*count > 2^m.
std::vector<std::uint64_t> fat_rows(const std::vector<std::uint64_t>& counts, int m) {
  std::vector<std::uint64_t> fat;
  for (std::size_t u = 0; u < counts.size(); ++u) {
    if (2 * counts[u] > pow2(m)) fat.push_back(u);
  }
  return fat;
}

std::uint64_t rank_of(const std::vector<std::uint64_t>& sorted, std::uint64_t value) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  if (it == sorted.end() || *it != value) {
    throw Error(Errc::kIndexOverflow, "element missing from its own enumeration");
  }
  return static_cast<std::uint64_t>(it - sorted.begin());
}

std::uint64_t read_rank(const BitString& bits) {
  if (bits.size() > 63) malformed("index wider than 63 bits");
  return bits.to_uint();
}

std::string pair_label(const BitString& x, const BitString& y) {
  return "(" + x.to_string() + "," + y.to_string() + ")";
}

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "NA"; }

void add_bounds(Report& r, const Bounds& b) {
  r.add("max_len", b.max_len);
  r.add("fuel", static_cast<std::int64_t>(b.cfg.fuel));
  r.add("output_cap", static_cast<std::int64_t>(b.cfg.output_cap));
  r.add("machine", machine_fingerprint_hex());
}

}  // namespace

InfoProfile try_info_profile(ComplexityEngine& engine, const BitString& x, const BitString& y,
                             const Bounds& bounds) {
  InfoProfile p;
  p.x = x;
  p.y = y;
  const BitString nx = BitString::bin(x.size());
  const BitString ny = BitString::bin(y.size());
  p.t_x = engine.complexity_of(x, {nx}, kPlain, bounds);
  p.t_y = engine.complexity_of(y, {x, ny}, kPlain, bounds);
  p.t = engine.complexity_of(x + y, {nx, ny}, kPlain, bounds);
  p.c_y = engine.complexity_of(y, {ny}, kPlain, bounds);
  p.c_x_given_y = engine.complexity_of(x, {y, nx}, kPlain, bounds);
  if (p.t_x) p.c2_x = engine.complexity_of(BitString::bin(*p.t_x), {nx}, kPlain, bounds);
  if (p.c_y) p.c2_y = engine.complexity_of(BitString::bin(*p.c_y), {ny}, kPlain, bounds);

  const std::pair<const char*, const Complexity*> fields[] = {
      {"C(x|n_x)", &p.t_x},      {"C(y|x,n_y)", &p.t_y},         {"C(xy|n_x,n_y)", &p.t},
      {"C(y|n_y)", &p.c_y},      {"C(x|y,n_x)", &p.c_x_given_y}, {"C2(x|n_x)", &p.c2_x},
      {"C2(y|n_y)", &p.c2_y}};
  for (const auto& [name, value] : fields) {
    if (!*value) p.missing.emplace_back(name);
  }
  if (p.t_x && p.t_y && p.t) p.w = *p.t_x + *p.t_y - *p.t;
  if (p.c_y && p.t_y) p.i_xy = *p.c_y - *p.t_y;
  if (p.t_x && p.c_x_given_y) p.i_yx = *p.t_x - *p.c_x_given_y;
  if (p.c2_x && p.c2_y) p.delta = *p.c2_x + *p.c2_y;
  return p;
}

InfoProfile info_profile(ComplexityEngine& engine, const BitString& x, const BitString& y,
                         const Bounds& bounds) {
  InfoProfile p = try_info_profile(engine, x, y, bounds);
  if (!p.complete()) {
    std::string what = "above bound:";
    for (const auto& m : p.missing) what += " " + m;
    throw Error(Errc::kPartialProfile, what);
  }
  return p;
}

int bucket_exponent(std::uint64_t count) {
  int m = 0;
  while (pow2(m) < count) ++m;
  return m;
}

bool CellGrid::cell(std::uint64_t u, std::uint64_t v) const {
  return std::binary_search(ones[u].begin(), ones[u].end(), v);
}

bool CellGrid::row_is_fat(std::uint64_t u) const {
  return std::binary_search(fat.begin(), fat.end(), u);
}

CellGrid make_cell_grid(const PairGrid& grid, std::uint64_t row, int threshold) {
  CellGrid g;
  g.n_x = grid.n_x;
  g.n_y = grid.n_y;
  g.threshold = threshold;
  g.row = row;
  g.ones.resize(grid.rows());
  for (std::size_t u = 0; u < grid.rows(); ++u) {
    for (std::size_t v = 0; v < grid.cols(); ++v) {
      const Complexity c = grid.at(u, v);
      if (c && *c <= threshold) g.ones[u].push_back(v);
    }
    g.total += g.ones[u].size();
  }
  g.m = bucket_exponent(g.ones[row].size());
  for (std::size_t u = 0; u < grid.rows(); ++u) {
    const std::uint64_t twice = 2 * g.ones[u].size();
    if (twice > pow2(g.m)) g.fat.push_back(u);
    if (twice >= pow2(g.m)) ++g.fat_at_least;
  }
  return g;
}

CellGrid build_cell_grid(ComplexityEngine& engine, const BitString& x, const BitString& y,
                         const Bounds& bounds) {
  const int nx = static_cast<int>(x.size());
  const int ny = static_cast<int>(y.size());
  const PairGrid grid = engine.pair_grid(nx, ny, kPlain, bounds);
  const Complexity t = grid.at(x.to_uint(), y.to_uint());
  if (!t) {
    throw Error(Errc::kThresholdUnavailable,
                "C(xy | n_x, n_y) above bound for " + pair_label(x, y));
  }
  return make_cell_grid(grid, x.to_uint(), *t);
}

KlCode kl_encode(ComplexityEngine& engine, const BitString& x, const BitString& y,
                 const Bounds& bounds) {
  const int nx = static_cast<int>(x.size());
  const int ny = static_cast<int>(y.size());
  const Complexity t_x = engine.complexity_of(x, {BitString::bin(nx)}, kPlain, bounds);
  const Complexity t_y = engine.complexity_of(y, {x, BitString::bin(ny)}, kPlain, bounds);
  const Complexity t = engine.complexity_of(x + y, {BitString::bin(nx), BitString::bin(ny)},
                                            kPlain, bounds);
  if (!t_x || !t_y || !t) {
    throw Error(Errc::kThresholdUnavailable, "t_x, t_y or t above bound for " + pair_label(x, y));
  }
  const int w = *t_x + *t_y - *t;
  if (w <= 0) throw Error(Errc::kNonPositiveDeficiency, "w = " + std::to_string(w));

  KlCode code;
  code.t = *t;
  code.record = LambdaRecord{static_cast<std::uint64_t>(std::abs(nx - ny)),
                             static_cast<std::uint64_t>(*t_x), static_cast<std::uint64_t>(*t_y),
                             static_cast<std::uint64_t>(w), nx > ny};
  code.lambda = encode_lambda(code.record);

  const CellGrid g = make_cell_grid(engine.pair_grid(nx, ny, kPlain, bounds), x.to_uint(), *t);
  code.m = g.m;
  const int f_width = *t - g.m + 2;
  const std::uint64_t f_rank = rank_of(g.fat, x.to_uint());
  const std::uint64_t s_rank = rank_of(g.ones[x.to_uint()], y.to_uint());
  if (f_width < 0 || f_rank >= pow2(f_width)) {
    throw Error(Errc::kIndexOverflow, "fat-row rank does not fit t-m+2 bits");
  }
  if (s_rank >= pow2(g.m)) throw Error(Errc::kIndexOverflow, "row rank does not fit m bits");
  code.f_index = BitString::fixed_width(f_rank, static_cast<std::size_t>(f_width));
  code.s_index = BitString::fixed_width(s_rank, static_cast<std::size_t>(g.m));
  return code;
}

BitString kl_decode_row(ComplexityEngine& engine, const BitString& lambda, const BitString& f_index,
                        int n_x, const Bounds& bounds) {
  const ParsedLambda pl = parse_lambda(lambda, n_x, bounds);
  const int m = pl.t + 2 - static_cast<int>(f_index.size());
  if (m < 0) malformed("f_index wider than t + 2");
  const PairGrid grid = engine.pair_grid(n_x, pl.n_y, kPlain, bounds);
  const std::vector<std::uint64_t> fat = fat_rows(row_counts(grid, pl.t), m);
  const std::uint64_t rank = read_rank(f_index);
  if (rank >= fat.size()) {
    throw Error(Errc::kRankOutOfRange, "fat-row rank " + std::to_string(rank) + " of " +
                                           std::to_string(fat.size()));
  }
  return BitString::fixed_width(fat[rank], static_cast<std::size_t>(n_x));
}

BitString kl_decode_column(ComplexityEngine& engine, const BitString& lambda, const BitString& x,
                           const BitString& s_index, const Bounds& bounds) {
  const int n_x = static_cast<int>(x.size());
  const ParsedLambda pl = parse_lambda(lambda, n_x, bounds);
  const CellGrid g =
      make_cell_grid(engine.pair_grid(n_x, pl.n_y, kPlain, bounds), x.to_uint(), pl.t);
  if (static_cast<int>(s_index.size()) != g.m) malformed("s_index width differs from m for row x");
  const auto& row = g.ones[x.to_uint()];
  const std::uint64_t rank = read_rank(s_index);
  if (rank >= row.size()) {
    throw Error(Errc::kRankOutOfRange, "row rank " + std::to_string(rank) + " of " +
                                           std::to_string(row.size()));
  }
  return BitString::fixed_width(row[rank], static_cast<std::size_t>(pl.n_y));
}

std::pair<BitString, BitString> kl_decode(ComplexityEngine& engine, const KlCode& code, int n_x,
                                          const Bounds& bounds) {
  BitString x = kl_decode_row(engine, code.lambda, code.f_index, n_x, bounds);
  BitString y = kl_decode_column(engine, code.lambda, x, code.s_index, bounds);
  return {std::move(x), std::move(y)};
}

CountingResult verify_counting_bounds(ComplexityEngine& engine, int n_x, int n_y,
                                      const Bounds& bounds) {
  CountingResult r;
  r.n_x = n_x;
  r.n_y = n_y;
  const PairGrid grid = engine.pair_grid(n_x, n_y, kPlain, bounds);
  for (std::uint64_t u = 0; u < grid.rows(); ++u) {
    for (std::uint64_t v = 0; v < grid.cols(); ++v) {
      const Complexity t = grid.at(u, v);
      if (!t) {
        ++r.pairs_skipped;
        continue;
      }
      ++r.pairs_checked;
      const CellGrid g = make_cell_grid(grid, u, *t);
      const std::string who = pair_label(BitString::fixed_width(u, n_x), BitString::fixed_width(v, n_y));
      const std::uint64_t s_cap = pow2(*t + 1);
      const std::uint64_t f_cap = pow2(*t - g.m + 2);
      const std::uint64_t sx = g.ones[u].size();

      if (g.total >= s_cap) r.violations.push_back(who + " |S| >= 2^(t+1)");
      if (g.fat.size() >= f_cap) r.violations.push_back(who + " |F| >= 2^(t-m+2)");
      if (!g.row_is_fat(u)) r.violations.push_back(who + " x not in F");
      if (!(2 * sx > pow2(g.m) && sx <= pow2(g.m))) r.violations.push_back(who + " m out of range");
      if ((g.m == 0) != (sx == 1)) r.violations.push_back(who + " m = 0 iff |S_x| = 1 broken");

      if (g.total < s_cap) {
        r.min_slack_s = std::min(r.min_slack_s.value_or(s_cap), s_cap - g.total);
      }
      if (g.fat.size() < f_cap) {
        r.min_slack_f = std::min(r.min_slack_f.value_or(f_cap), f_cap - g.fat.size());
      }
      if (g.fat_at_least != g.fat.size()) ++r.variant_differs;
      if (g.fat_at_least >= f_cap) ++r.variant_violations;
    }
  }
  return r;
}

Report to_report(const CountingResult& r, const Bounds& bounds) {
  Report rep;
  rep.name = "counting-bounds";
  rep.add("n_x", r.n_x);
  rep.add("n_y", r.n_y);
  add_bounds(rep, bounds);
  rep.add("pairs_checked", static_cast<std::int64_t>(r.pairs_checked));
  rep.add("pairs_skipped_t_above_bound", static_cast<std::int64_t>(r.pairs_skipped));
  rep.add("violations", static_cast<std::int64_t>(r.violations.size()));
  rep.add("min_slack_S", r.min_slack_s ? std::to_string(*r.min_slack_s) : "NA");
  rep.add("min_slack_F", r.min_slack_f ? std::to_string(*r.min_slack_f) : "NA");
  rep.add("at_least_variant_differs", static_cast<std::int64_t>(r.variant_differs));
  rep.add("at_least_variant_violations", static_cast<std::int64_t>(r.variant_violations));
  for (const auto& v : r.violations) rep.fail(v);
  return rep;
}

ChainRuleResult verify_chain_rule_upper(ComplexityEngine& engine, int n, const Bounds& bounds,
                                        std::optional<int> pin) {
  ChainRuleResult r;
  r.n = n;
  r.pin = pin;
  const BitString bn = BitString::bin(n);
  const PairGrid grid = engine.pair_grid(n, n, kPlain, bounds);
  for (std::uint64_t u = 0; u < grid.rows(); ++u) {
    const BitString x = BitString::fixed_width(u, n);
    for (std::uint64_t v = 0; v < grid.cols(); ++v) {
      const BitString y = BitString::fixed_width(v, n);
      const Complexity t = grid.at(u, v);
      const Complexity c_y = engine.complexity_of(y, {bn}, kPlain, bounds);
      const Complexity c_x_y = engine.complexity_of(x, {y, bn}, kPlain, bounds);
      Complexity c2_y;
      if (c_y) c2_y = engine.complexity_of(BitString::bin(*c_y), {bn}, kPlain, bounds);
      if (!t || !c_y || !c_x_y || !c2_y) {
        ++r.pairs_skipped;
        continue;
      }
      ++r.pairs_measured;
      const int excess = *t - (*c_y + *c_x_y + 2 * *c2_y);
      if (!r.excess || excess > *r.excess) {
        r.excess = excess;
        r.argmax_x = x;
        r.argmax_y = y;
      }
    }
  }
  if (pin && r.excess && *r.excess > *pin) {
    r.violations.push_back("B(" + std::to_string(n) + ") = " + std::to_string(*r.excess) +
                           " exceeds pinned " + std::to_string(*pin));
  }
  return r;
}

Report to_report(const ChainRuleResult& r, const Bounds& bounds) {
  Report rep;
  rep.name = "chain-rule-upper";
  rep.add("n", r.n);
  add_bounds(rep, bounds);
  rep.add("pairs_measured", static_cast<std::int64_t>(r.pairs_measured));
  rep.add("pairs_skipped", static_cast<std::int64_t>(r.pairs_skipped));
  rep.add("B", opt(r.excess));
  rep.add("argmax", r.excess ? pair_label(r.argmax_x, r.argmax_y) : "NA");
  rep.add("pinned_B", opt(r.pin));
  for (const auto& v : r.violations) rep.fail(v);
  return rep;
}

MainTheoremResult verify_main_theorem(ComplexityEngine& engine, int n_x, int n_y, const Bounds& bounds,
                                      std::optional<LinearPin> pin) {
  MainTheoremResult r;
  r.n_x = n_x;
  r.n_y = n_y;
  r.pin = pin;
  engine.pair_grid(n_x, n_y, kPlain, bounds);  // guard check before the sweep
  const double length_term = log_term(std::abs(n_x - n_y));
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << n_x); ++u) {
    const BitString x = BitString::fixed_width(u, n_x);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n_y); ++v) {
      const BitString y = BitString::fixed_width(v, n_y);
      ++r.pairs_total;
      InfoProfile p = try_info_profile(engine, x, y, bounds);
      if (!p.complete()) {
        ++r.pairs_partial;
        continue;
      }
      if (*p.w <= 0) {
        ++r.pairs_nonpositive_w;
        continue;
      }
      MainTheoremRow row;
      row.bound_term = log_term(*p.i_xy) + length_term + *p.delta;

      const std::string who = pair_label(x, y);
      const KlCode code = kl_encode(engine, x, y, bounds);
      row.code_length = code.length();
      row.lambda_length = code.lambda.size();
      try {
        row.round_trip = kl_decode(engine, code, n_x, bounds) == std::pair{x, y};
      } catch (const Error& e) {
        r.violations.push_back(who + " decode failed: " + e.what());
      }
      if (!row.round_trip) {
        row.pass = false;
        r.violations.push_back(who + " round trip mismatch");
      }
      if (row.code_length != row.lambda_length + static_cast<std::size_t>(*p.t) + 2) {
        row.pass = false;
        r.violations.push_back(who + " code length != lambda + t + 2");
      }
      if (static_cast<int>(code.f_index.size()) != *p.t - code.m + 2 ||
          static_cast<int>(code.s_index.size()) != code.m) {
        row.pass = false;
        r.violations.push_back(who + " index widths differ from t-m+2 / m");
      }
      if (pin && !pin->holds(row.bound_term, *p.w)) {
        row.pass = false;
        r.violations.push_back(who + " w = " + std::to_string(*p.w) + " > a*g + b with g = " +
                               fmt_double(row.bound_term));
      }
      r.lambda_constant = std::max(
          r.lambda_constant, static_cast<double>(*p.w - 2) / static_cast<double>(row.lambda_length));
      row.profile = std::move(p);
      r.rows.push_back(std::move(row));
    }
  }
  if (!r.rows.empty()) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows) pts.emplace_back(row.bound_term, *row.profile.w);
    r.fitted = fit_upper_line(pts);
  }
  return r;
}

Report to_report(const MainTheoremResult& r, const Bounds& bounds) {
  Report rep;
  rep.name = "main-theorem";
  rep.add("n_x", r.n_x);
  rep.add("n_y", r.n_y);
  add_bounds(rep, bounds);
  rep.add("pairs_total", static_cast<std::int64_t>(r.pairs_total));
  rep.add("pairs_w_positive", static_cast<std::int64_t>(r.rows.size()));
  rep.add("pairs_w_nonpositive", static_cast<std::int64_t>(r.pairs_nonpositive_w));
  rep.add("pairs_partial", static_cast<std::int64_t>(r.pairs_partial));
  if (!r.rows.empty()) {
    rep.add("fitted_a", fmt_double(r.fitted.a));
    rep.add("fitted_b", fmt_double(r.fitted.b));
  }
  rep.add("pinned_a", r.pin ? fmt_double(r.pin->a) : "NA");
  rep.add("pinned_b", r.pin ? fmt_double(r.pin->b) : "NA");
  rep.add("lambda_constant", fmt_double(r.lambda_constant));
  rep.columns = {"x", "y", "t_x", "t_y", "t", "w", "i_xy", "i_yx", "delta", "bound_term", "pass"};
  for (const auto& row : r.rows) {
    const InfoProfile& p = row.profile;
    rep.records.push_back({p.x.to_string(), p.y.to_string(), fmt_complexity(p.t_x),
                           fmt_complexity(p.t_y), fmt_complexity(p.t), opt(p.w), opt(p.i_xy),
                           opt(p.i_yx), opt(p.delta), fmt_double(row.bound_term),
                           row.pass ? "1" : "0"});
  }
  for (const auto& v : r.violations) rep.fail(v);
  return rep;
}

AsymmetryWitness find_asymmetry_witness(ComplexityEngine& engine, int n_y, const Bounds& bounds) {
  if (n_y < 1 || n_y > kPairGuard - 1) {
    throw Error(Errc::kBoundTooLarge, "witness search needs 1 <= n_y <= " + std::to_string(kPairGuard - 1));
  }
  const BitString x = BitString::bin(n_y);
  if (x.size() + n_y > static_cast<std::size_t>(kPairGuard)) {
    throw Error(Errc::kBoundTooLarge, "witness pair exceeds the pair guard");
  }
  std::optional<AsymmetryWitness> best;
  std::uint64_t candidates = 0;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n_y); ++v) {
    const BitString y = BitString::fixed_width(v, n_y);
    InfoProfile p = try_info_profile(engine, x, y, bounds);
    if (!p.i_xy || !p.i_yx) continue;
    ++candidates;
    const int gap = *p.i_yx - *p.i_xy;
    if (!best || gap > best->gap) best = AsymmetryWitness{x, y, std::move(p), gap, 0};
  }
  if (!best) throw Error(Errc::kNoWitness, "no candidate has both information terms within bounds");
  best->candidates = candidates;
  return *best;
}

Report to_report(const AsymmetryWitness& w, const Bounds& bounds, std::optional<int> pin) {
  Report rep;
  rep.name = "asymmetry-witness";
  rep.add("n_y", static_cast<std::int64_t>(w.y.size()));
  add_bounds(rep, bounds);
  rep.add("candidates", static_cast<std::int64_t>(w.candidates));
  rep.add("x", w.x.to_string());
  rep.add("y", w.y.to_string());
  rep.add("i_xy", opt(w.profile.i_xy));
  rep.add("i_yx", opt(w.profile.i_yx));
  rep.add("gap", w.gap);
  rep.add("pinned_gap0", opt(pin));
  rep.add("profile_complete", w.profile.complete() ? "yes" : "no");
  if (pin && w.gap < *pin) {
    rep.fail("gap " + std::to_string(w.gap) + " below pinned gap0 " + std::to_string(*pin));
  }
  return rep;
}

}  // namespace kolm
