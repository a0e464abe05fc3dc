// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Pinned constants are fitted on the n = 3 runs of this same
// process and then applied at the larger sizes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "kolm/codes.h"
#include "kolm/complexity.h"
#include "kolm/lambalgen.h"
#include "kolm/machine.h"
#include "kolm/soi.h"
#include "oracle.h"

namespace {

using kolm::BitString;
using kolm::Bounds;
using kolm::Mode;

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> notes;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string str(double v, int digits = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string line_str(const kolm::LinearPin& p) { return "(a=" + str(p.a, 3) + ", b=" + str(p.b, 3) + ")"; }

// Same rule as the command-line tool: the smallest L at which a literal of
// `bits` bits fits, capped at the guard.
int literal_bound(int bits, Mode mode) {
  int len = 2 + static_cast<int>(kolm::sd_length(bits)) + bits;
  if (mode == Mode::kPrefixFree) len += 4;
  return std::min(len, kolm::kDefaultLengthGuard);
}

Bounds at(int max_len) { return Bounds{max_len, {}}; }

kolm::ComplexityEngine& engine() {
  static kolm::ComplexityEngine e;
  return e;
}

// Tables built outside the shared engine, for the counting check.
std::vector<kolm::ComplexityTable>& extra_tables() {
  static std::vector<kolm::ComplexityTable> t;
  return t;
}

void add_first(Verdict& v, const std::vector<std::string>& violations, std::size_t limit = 3) {
  for (std::size_t i = 0; i < violations.size() && i < limit; ++i) v.notes.push_back(violations[i]);
  if (violations.size() > limit) {
    v.notes.push_back("... " + std::to_string(violations.size() - limit) + " more");
  }
}

Verdict prefix_free_domain() {
  const auto t0 = Clock::now();
  constexpr int kMax = 14;
  std::unordered_set<BitString> valid;
  double kraft = 0, kraft_halting = 0;
  for (const auto& p : kolm::oracle::all_strings_upto(kMax)) {
    if (!kolm::parse_program(p, Mode::kPrefixFree).ok()) continue;
    valid.insert(p);
    kraft += std::ldexp(1.0, -static_cast<int>(p.size()));
    if (kolm::execute(p, BitString(), Mode::kPrefixFree, {}).halted) {
      kraft_halting += std::ldexp(1.0, -static_cast<int>(p.size()));
    }
  }
  std::uint64_t prefix_pairs = 0;
  for (const auto& p : valid) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (valid.count(p.substr(0, k))) ++prefix_pairs;
    }
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = prefix_pairs == 0 && kraft <= 1.0 && secs <= 60;
  v.detail = std::to_string(valid.size()) + " valid programs of length <= 14, " +
             std::to_string(prefix_pairs) + " prefix pairs, Kraft sum " + str(kraft, 6) +
             " (halting on empty condition " + str(kraft_halting, 6) + "), " + str(secs) + " s";
  return v;
}

Verdict sd_codes() {
  std::uint64_t bound_breaks = 0, trip_breaks = 0;
  for (std::uint64_t d = 1; d <= 4096; ++d) {
    const auto len = kolm::sd_encode(d).size();
    if (len != kolm::sd_length(d) || len > 2 * static_cast<std::size_t>(std::floor(std::log2(d))) + 4) {
      ++bound_breaks;
    }
  }
  for (std::uint64_t d = 0; d <= (std::uint64_t{1} << 20); ++d) {
    const BitString e = kolm::sd_encode(d);
    const auto r = kolm::sd_decode(e);
    if (r.value != d || r.consumed != e.size()) ++trip_breaks;
  }
  Verdict v;
  v.pass = bound_breaks == 0 && trip_breaks == 0;
  v.detail = "length bound breaks on [1,4096]: " + std::to_string(bound_breaks) +
             ", round-trip breaks on [0,2^20]: " + std::to_string(trip_breaks);
  return v;
}

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  std::uint64_t compared = 0, mismatched = 0;
  Verdict v;
  for (Mode mode : {Mode::kPlain, Mode::kPrefixFree}) {
    for (const auto& cond : kolm::oracle::all_strings_upto(6)) {
      for (int max_len : {8, 12}) {
        auto built = kolm::build_table(cond, mode, max_len, {});
        auto naive = kolm::oracle::naive_table(cond, mode, max_len);
        ++compared;
        if (!(built == naive)) {
          ++mismatched;
          v.notes.push_back(std::string(kolm::mode_name(mode)) + " cond '" + cond.to_string() +
                            "' L=" + std::to_string(max_len) + " differs");
        }
        extra_tables().push_back(std::move(built));
        extra_tables().push_back(std::move(naive));
      }
    }
  }
  v.pass = mismatched == 0;
  v.detail = std::to_string(compared) + " table pairs (conditions of length <= 6, L in {8,12}, both modes), " +
             std::to_string(mismatched) + " mismatches, " + str(seconds_since(t0)) + " s";
  return v;
}

Verdict grid_bounds() {
  const auto t0 = Clock::now();
  Verdict v;
  std::ostringstream os;
  for (int n : {3, 4}) {
    const auto r = kolm::verify_counting_bounds(engine(), n, n, at(18));
    v.pass = v.pass && r.violations.empty();
    add_first(v, r.violations);
    os << "n=" << n << ": " << r.pairs_checked << " pairs, " << r.violations.size() << " violations, "
       << r.pairs_skipped << " above bound; ";
  }
  // At L=18 most 8-bit pairs are above bound; L=20 covers every n=4 pair.
  const auto wide = kolm::verify_counting_bounds(engine(), 4, 4, at(20));
  v.pass = v.pass && wide.violations.empty();
  add_first(v, wide.violations);
  os << "L=18; supplementary n=4 at L=20: " << wide.pairs_checked << " pairs, " << wide.violations.size()
     << " violations; " << str(seconds_since(t0)) << " s";
  v.detail = os.str();
  return v;
}

Verdict two_part_code(kolm::MainTheoremResult& n3, kolm::MainTheoremResult& n4) {
  n3 = kolm::verify_main_theorem(engine(), 3, 3, at(literal_bound(6, Mode::kPlain)));
  n4 = kolm::verify_main_theorem(engine(), 4, 4, at(literal_bound(8, Mode::kPlain)));
  Verdict v;
  std::ostringstream os;
  for (const auto* r : {&n3, &n4}) {
    std::size_t trips = 0;
    for (const auto& row : r->rows) trips += row.round_trip;
    v.pass = v.pass && r->violations.empty() && trips == r->rows.size() && !r->rows.empty();
    add_first(v, r->violations);
    os << "n=" << r->n_x << ": " << trips << "/" << r->rows.size() << " pairs with w > 0 round trip ("
       << r->pairs_partial << " with an above-bound term); ";
  }
  v.detail = os.str() + "lengths and index widths exact";
  return v;
}

Verdict main_theorem_pin(const kolm::MainTheoremResult& n3) {
  Verdict v;
  const kolm::LinearPin pin = n3.fitted;
  std::ostringstream os;
  os << "pin " << line_str(pin) << " from n=3; ";
  for (auto [nx, ny] : {std::pair{4, 4}, std::pair{3, 5}}) {
    const auto r = kolm::verify_main_theorem(engine(), nx, ny, at(literal_bound(nx + ny, Mode::kPlain)), pin);
    int max_w = 0;
    std::size_t breaks = 0;
    for (const auto& row : r.rows) {
      max_w = std::max(max_w, *row.profile.w);
      if (!row.pass) ++breaks;
    }
    v.pass = v.pass && r.violations.empty();
    os << "(" << nx << "," << ny << "): " << breaks << "/" << r.rows.size() << " pairs break it, max w "
       << max_w << "; ";
    if (breaks) {
      v.notes.push_back("(" + std::to_string(nx) + "," + std::to_string(ny) + ") refit " +
                        line_str(r.fitted));
    }
  }
  v.detail = os.str();
  if (!v.pass) {
    v.notes.push_back("the largest deficiency w grows with n on this machine, while n=3 gives no "
                      "slope to extrapolate (a=0)");
  }
  return v;
}

Verdict theorem2_pin() {
  const Bounds b3 = at(literal_bound(6, Mode::kPlain));
  const Bounds b4 = at(literal_bound(8, Mode::kPlain));
  const auto r3 = kolm::verify_theorem2(engine(), 3, 4, b3);
  Verdict v;
  if (!r3.fitted) {
    v.pass = false;
    v.detail = "no qualifying pairs at n=3";
    return v;
  }
  const auto r4 = kolm::verify_theorem2(engine(), 4, 4, b4, r3.fitted);
  v.pass = r4.violations.empty();
  std::ostringstream os;
  os << "pin " << line_str(*r3.fitted) << " from n=3; n=4 D by c:";
  for (const auto& row : r4.rows) {
    os << " " << row.c << ":" << (row.deficiency ? std::to_string(*row.deficiency) : "?");
  }
  os << "; " << r4.violations.size() << " violations";
  v.detail = os.str();
  add_first(v, r4.violations);
  return v;
}

Verdict theorem3() {
  const Bounds b3 = at(literal_bound(6, Mode::kPrefixFree));
  const Bounds b4 = at(literal_bound(8, Mode::kPrefixFree));
  Verdict v;
  std::ostringstream os;
  const auto r3 = kolm::verify_theorem3_empirical(engine(), 3, 4, b3);
  bool empirical = false;
  if (r3.fitted) {
    const auto r4 = kolm::verify_theorem3_empirical(engine(), 4, 4, b4, r3.fitted);
    empirical = r4.violations.empty();
    os << "empirical: pin " << line_str(*r3.fitted) << " from n=3, " << r4.violations.size()
       << " violations at n=4; ";
    add_first(v, r4.violations, 2);
  } else {
    os << "empirical: no qualifying pairs at n=3; ";
  }
  bool structural = true;
  const int overhead = kolm::k_overhead(engine(), 3, b3);
  for (int offset : {0, overhead}) {
    const auto s = kolm::verify_theorem3_structure(engine(), 3, 4, b3, {}, offset);
    structural = structural && s.violations.empty();
    add_first(v, s.violations);
    os << "structure offset " << offset << ": " << s.nesting_checks << " nesting, " << s.counting_checks
       << " counting, " << s.p1_round_trips << " p1 and " << s.p2_round_trips << " p2 round trips, "
       << s.case_a << " case (a), " << s.case_b << " case (b), " << s.violations.size()
       << " violations, " << s.f_nesting_breaks << " F(d+1) not inside F(d); ";
  }
  v.pass = empirical && structural;
  v.detail = os.str() + (empirical ? "empirical pass" : "empirical FAIL") + ", " +
             (structural ? "structure pass" : "structure FAIL");
  return v;
}

Verdict witness() {
  // gap0 from the same exhaustive search, pinned by the first run.
  const Bounds b = at(literal_bound(9, Mode::kPlain));
  const auto first = kolm::find_asymmetry_witness(engine(), 6, b);
  const int gap0 = first.gap;
  kolm::ComplexityEngine fresh;
  const auto second = kolm::find_asymmetry_witness(fresh, 6, b);
  Verdict v;
  v.pass = second.gap >= gap0 && second.x == first.x && second.y == first.y && gap0 > 0;
  v.detail = "x=" + first.x.to_string() + " y=" + first.y.to_string() + " gap0=" + std::to_string(gap0) +
             " over " + std::to_string(first.candidates) + " candidates; rerun on a fresh engine gives y=" +
             second.y.to_string() + " gap " + std::to_string(second.gap);
  return v;
}

std::map<std::string, std::string> read_reports(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".txt") continue;  // the manifest holds timings
    std::ifstream in(e.path());
    out[e.path().filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
  }
  return out;
}

Verdict determinism() {
  Verdict v;
  const auto base = std::filesystem::temp_directory_path() / "kolm_acceptance";
  std::filesystem::remove_all(base);
  std::map<std::string, std::string> runs[2];
  const unsigned workers[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    const auto dir = base / ("w" + std::to_string(workers[i]));
    const std::string cmd = std::string(KOLMLAB_PATH) + " --workers " + std::to_string(workers[i]) +
                            " --out-dir " + dir.string() + " report > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    (void)rc;  // the bundle carries the red criteria; only the reports matter here
    runs[i] = read_reports(dir);
  }
  // In-process check of the parallel table builder as well.
  kolm::ComplexityEngine one({1, kolm::kDefaultLengthGuard, std::nullopt});
  kolm::ComplexityEngine many({4, kolm::kDefaultLengthGuard, std::nullopt});
  const auto g1 = one.pair_grid(4, 4, Mode::kPlain, at(18));
  const auto g4 = many.pair_grid(4, 4, Mode::kPlain, at(18));
  const bool grids_equal = g1.cells == g4.cells;
  v.pass = !runs[0].empty() && runs[0] == runs[1] && grids_equal;
  std::size_t differing = 0;
  for (const auto& [name, text] : runs[0]) {
    if (!runs[1].count(name) || runs[1].at(name) != text) {
      ++differing;
      v.notes.push_back(name + " differs");
    }
  }
  v.detail = std::to_string(runs[0].size()) + " report files from 'report' with 1 and 4 workers, " +
             std::to_string(differing) + " differ; 4x4 pair grid " + (grids_equal ? "identical" : "differs");
  return v;
}

Verdict program_counting() {
  std::uint64_t tables = 0, checks = 0, breaks = 0;
  auto check = [&](const kolm::ComplexityTable& t) {
    ++tables;
    for (int len = 0; len <= t.key().max_len; ++len) {
      ++checks;
      if (t.count_at_most(len) >= (std::uint64_t{1} << (len + 1))) ++breaks;
    }
  };
  for (const auto& t : engine().tables()) check(*t);
  for (const auto& t : extra_tables()) check(t);
  Verdict v;
  v.pass = breaks == 0 && tables > 0;
  v.detail = std::to_string(tables) + " tables, " + std::to_string(checks) + " thresholds, " +
             std::to_string(breaks) + " with |{value <= t}| >= 2^(t+1)";
  return v;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  std::map<int, std::pair<std::string, Verdict>> results;
  auto run = [&](int id, const std::string& name, const std::function<Verdict()>& f) {
    const auto start = Clock::now();
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("threw: ") + e.what();
    }
    v.detail += " [" + str(seconds_since(start)) + " s]";
    results[id] = {name, std::move(v)};
  };

  kolm::MainTheoremResult n3, n4;
  run(1, "prefix-free domain", prefix_free_domain);
  run(5, "self-delimiting code", sd_codes);
  run(6, "oracle equivalence", oracle_equivalence);
  run(3, "grid bounds", grid_bounds);
  run(4, "two-part code", [&] { return two_part_code(n3, n4); });
  run(7, "main theorem pin", [&] { return main_theorem_pin(n3); });
  run(8, "theorem 2 pin", theorem2_pin);
  run(9, "theorem 3", theorem3);
  run(10, "asymmetry witness", witness);
  run(11, "determinism", determinism);
  run(2, "program counting", program_counting);  // last: sees every table built above

  const double total = seconds_since(t0);
  Verdict wall;
  wall.pass = total <= 600;
  wall.detail = "suite took " + str(total) + " s (limit 600 s)";
  results[12] = {"wall clock", wall};

  int failed = 0;
  for (const auto& [id, entry] : results) {
    const auto& [name, v] = entry;
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << v.detail << '\n';
    for (const auto& note : v.notes) std::cout << "    " << note << '\n';
  }
  std::cout << (12 - failed) << "/12 criteria pass\n";
  return failed == 0 ? 0 : 1;
}
