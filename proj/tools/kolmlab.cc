// kolmlab: batch front end over the complexity tables and the verifiers.
//
// Exit codes: 0 all assertions passed, 1 assertion failures (listed in the
// report), 2 usage or configuration error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kolm/codes.h"
#include "kolm/complexity.h"
#include "kolm/lambalgen.h"
#include "kolm/machine.h"
#include "kolm/pins.h"
#include "kolm/report.h"
#include "kolm/soi.h"

namespace {

using kolm::BitString;
using kolm::Bounds;
using kolm::PinStore;
using kolm::Report;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::string cache_dir;
  std::optional<int> max_len;
  std::uint64_t fuel = kolm::MachineConfig{}.fuel;
  std::uint64_t output_cap = kolm::MachineConfig{}.output_cap;
  std::string mode = "plain";
  unsigned workers = 1;
  std::string format = "structured";
  std::string pin_file;
  bool pin = false;
  std::string out_dir = "kolm-reports";
};

// One report and the file stem it is written under.
struct Section {
  std::string stem;
  Report report;
};

struct Outcome {
  std::vector<Section> sections;
  std::size_t primary = 0;            // rendered on stdout in csv format
  std::optional<std::string> stdout_text;  // replaces the rendered reports on stdout
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> notes;     // pin actions, printed on stderr
};

BitString parse_bits(const std::string& flag, const std::string& text) {
  try {
    return BitString(text);
  } catch (const std::invalid_argument&) {
    throw UsageError(flag + " must be a string of 0s and 1s, got '" + text + "'");
  }
}

// Smallest L at which a literal of `bits` bits fits: LIT opcode, SD length,
// payload, plus HALT in prefix-free mode. Capped at the guard.
int literal_bound(int bits, kolm::Mode mode) {
  int len = 2 + static_cast<int>(kolm::sd_length(bits)) + bits;
  if (mode == kolm::Mode::kPrefixFree) len += 4;
  return std::min(len, kolm::kDefaultLengthGuard);
}

class Runner {
 public:
  explicit Runner(const Global& g) : g_(g) {}

  kolm::ComplexityEngine& engine() {
    if (!engine_) {
      kolm::ComplexityEngine::Options o;
      o.workers = g_.workers;
      if (!g_.cache_dir.empty()) o.cache_dir = g_.cache_dir;
      engine_.emplace(o);
    }
    return *engine_;
  }

  kolm::Mode mode() const { return kolm::parse_mode(g_.mode).value(); }  // validated by CLI11

  Bounds bounds(int default_len) const {
    return Bounds{g_.max_len.value_or(default_len), {g_.fuel, g_.output_cap}};
  }

  PinStore& pins() {
    if (!pins_) {
      pins_ = g_.pin_file.empty() ? PinStore() : PinStore::load(g_.pin_file);
    }
    return *pins_;
  }

  bool pinning() const { return g_.pin; }

  void save_pins() {
    if (g_.pin) pins().save(g_.pin_file);
  }

 private:
  const Global& g_;
  std::optional<kolm::ComplexityEngine> engine_;
  std::optional<PinStore> pins_;
};

nlohmann::json bounds_json(const Bounds& b) {
  return {{"max_len", b.max_len}, {"fuel", b.cfg.fuel}, {"output_cap", b.cfg.output_cap}};
}

// ---- table -----------------------------------------------------------------

Outcome table_build(Runner& run, const std::string& cond_text) {
  const BitString cond = parse_bits("--cond", cond_text);
  const Bounds b = run.bounds(18);
  const auto table = run.engine().table(cond, run.mode(), b);
  Report rep;
  rep.name = "table";
  rep.add("condition", cond.to_string());
  rep.add("mode", kolm::mode_name(run.mode()));
  rep.add("max_len", b.max_len);
  rep.add("fuel", static_cast<std::int64_t>(b.cfg.fuel));
  rep.add("output_cap", static_cast<std::int64_t>(b.cfg.output_cap));
  rep.add("machine", kolm::machine_fingerprint_hex());
  rep.add("digest", table->key().digest());
  rep.add("entries", static_cast<std::int64_t>(table->size()));
  rep.columns = {"t", "outputs_le_t", "programs_le_t_bound"};
  for (int t = 0; t <= b.max_len; ++t) {
    const auto count = table->count_at_most(t);
    const auto cap = std::uint64_t{1} << (t + 1);
    rep.records.push_back({std::to_string(t), std::to_string(count), std::to_string(cap)});
    if (count >= cap) rep.fail("t=" + std::to_string(t) + ": " + std::to_string(count) + " outputs");
  }
  Outcome out;
  out.params = {{"cond", cond.to_string()}, {"mode", kolm::mode_name(run.mode())}};
  out.sections.push_back({"table", std::move(rep)});
  return out;
}

Outcome table_query(Runner& run, const std::string& x_text, const std::string& cond_text,
                    const std::vector<std::string>& item_texts) {
  const BitString x = parse_bits("--x", x_text);
  if (!cond_text.empty() && !item_texts.empty()) throw UsageError("use either --cond or --item");
  std::vector<BitString> items;
  for (const auto& t : item_texts) items.push_back(parse_bits("--item", t));
  const BitString cond = items.empty() ? parse_bits("--cond", cond_text) : kolm::pack_condition(items);
  const Bounds b = run.bounds(18);
  const kolm::Complexity c = run.engine().table(cond, run.mode(), b)->lookup(x);

  Report rep;
  rep.name = "query";
  rep.add("x", x.to_string());
  rep.add("condition", cond.to_string());
  rep.add("mode", kolm::mode_name(run.mode()));
  rep.add("max_len", b.max_len);
  rep.add("machine", kolm::machine_fingerprint_hex());
  rep.add("complexity", kolm::fmt_complexity(c));
  Outcome out;
  out.params = {{"x", x.to_string()}, {"cond", cond.to_string()}, {"mode", kolm::mode_name(run.mode())}};
  out.stdout_text = kolm::fmt_complexity(c) + "\n";
  out.sections.push_back({"query", std::move(rep)});
  return out;
}

// ---- soi -------------------------------------------------------------------

Report profile_report(const kolm::InfoProfile& p, const Bounds& b) {
  Report rep;
  rep.name = "profile";
  rep.add("max_len", b.max_len);
  rep.add("machine", kolm::machine_fingerprint_hex());
  rep.add("c_y", kolm::fmt_complexity(p.c_y));
  rep.add("c_x_given_y", kolm::fmt_complexity(p.c_x_given_y));
  rep.add("c2_x", kolm::fmt_complexity(p.c2_x));
  rep.add("c2_y", kolm::fmt_complexity(p.c2_y));
  std::string missing;
  for (const auto& m : p.missing) missing += (missing.empty() ? "" : " ") + m;
  rep.add("above_bound", missing.empty() ? "none" : missing);
  auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string("NA"); };
  std::string bound_term = "NA";
  if (p.i_xy && p.delta) {
    bound_term = kolm::fmt_double(kolm::log_term(*p.i_xy) +
                                  kolm::log_term(std::abs(static_cast<int>(p.x.size()) -
                                                          static_cast<int>(p.y.size()))) +
                                  *p.delta);
  }
  rep.columns = {"x", "y", "t_x", "t_y", "t", "w", "i_xy", "i_yx", "delta", "bound_term", "pass"};
  rep.records.push_back({p.x.to_string(), p.y.to_string(), kolm::fmt_complexity(p.t_x),
                         kolm::fmt_complexity(p.t_y), kolm::fmt_complexity(p.t), opt(p.w), opt(p.i_xy),
                         opt(p.i_yx), opt(p.delta), bound_term, p.complete() ? "1" : "0"});
  return rep;
}

Outcome soi_profile(Runner& run, const std::string& x_text, const std::string& y_text) {
  const BitString x = parse_bits("--x", x_text);
  const BitString y = parse_bits("--y", y_text);
  const Bounds b = run.bounds(literal_bound(x.size() + y.size(), kolm::Mode::kPlain));
  Outcome out;
  out.params = {{"x", x.to_string()}, {"y", y.to_string()}};
  out.sections.push_back({"profile", profile_report(kolm::try_info_profile(run.engine(), x, y, b), b)});
  return out;
}

Outcome soi_grid(Runner& run, const std::string& x_text, const std::string& y_text) {
  const BitString x = parse_bits("--x", x_text);
  const BitString y = parse_bits("--y", y_text);
  const Bounds b = run.bounds(literal_bound(x.size() + y.size(), kolm::Mode::kPlain));
  const kolm::CellGrid g = kolm::build_cell_grid(run.engine(), x, y, b);
  Report rep;
  rep.name = "grid";
  rep.add("x", x.to_string());
  rep.add("y", y.to_string());
  rep.add("max_len", b.max_len);
  rep.add("machine", kolm::machine_fingerprint_hex());
  rep.add("t", g.threshold);
  rep.add("m", g.m);
  rep.add("S_size", static_cast<std::int64_t>(g.total));
  rep.add("F_size", static_cast<std::int64_t>(g.fat.size()));
  rep.add("F_size_at_least_variant", static_cast<std::int64_t>(g.fat_at_least));
  rep.columns = {"u", "S_u_size", "fat"};
  for (std::uint64_t u = 0; u < g.ones.size(); ++u) {
    rep.records.push_back({BitString::fixed_width(u, g.n_x).to_string(), std::to_string(g.ones[u].size()),
                           g.row_is_fat(u) ? "1" : "0"});
  }
  if (g.total >= (std::uint64_t{1} << (g.threshold + 1))) rep.fail("|S| >= 2^(t+1)");
  if (g.fat.size() >= (std::uint64_t{1} << (g.threshold - g.m + 2))) rep.fail("|F| >= 2^(t-m+2)");
  if (!g.row_is_fat(g.row)) rep.fail("x not in F");
  Outcome out;
  out.params = {{"x", x.to_string()}, {"y", y.to_string()}};
  out.sections.push_back({"grid", std::move(rep)});
  return out;
}

std::string size_tag(int nx, int ny) { return std::to_string(nx) + "x" + std::to_string(ny); }

// What a size sweep measured, for pinning later sizes.
struct Measured {
  std::optional<kolm::LinearPin> main_fit;
  std::optional<int> chain_b;
};

// Counting bounds, chain rule (square sizes) and the main theorem at one size.
Measured soi_verify_into(Runner& run, int nx, int ny, Outcome& out,
                     std::optional<kolm::LinearPin> main_pin, std::optional<int> chain_pin,
                     bool pin_here) {
  const Bounds b = run.bounds(literal_bound(nx + ny, kolm::Mode::kPlain));
  const std::string tag = size_tag(nx, ny);
  Measured m;
  out.sections.push_back({"counting-bounds_" + tag,
                          to_report(kolm::verify_counting_bounds(run.engine(), nx, ny, b), b)});
  if (nx == ny) {
    const auto chain = kolm::verify_chain_rule_upper(run.engine(), nx, b, pin_here ? std::nullopt : chain_pin);
    m.chain_b = chain.excess;
    if (pin_here && chain.excess) {
      run.pins().set_integer(PinStore::kChainRule, *chain.excess, {{"n", nx}, {"bounds", bounds_json(b)}});
      out.notes.push_back("pinned chain_rule_B = " + std::to_string(*chain.excess));
    }
    out.sections.push_back({"chain-rule_" + tag, to_report(chain, b)});
  }
  const auto main = kolm::verify_main_theorem(run.engine(), nx, ny, b, pin_here ? std::nullopt : main_pin);
  if (pin_here && !main.rows.empty()) {
    run.pins().set_line(PinStore::kMainTheorem, main.fitted,
                        {{"n_x", nx}, {"n_y", ny}, {"bounds", bounds_json(b)}});
    out.notes.push_back("pinned main_theorem a=" + kolm::fmt_double(main.fitted.a) +
                        " b=" + kolm::fmt_double(main.fitted.b));
  }
  if (!main.rows.empty()) m.main_fit = main.fitted;
  out.primary = out.sections.size();
  out.sections.push_back({"main-theorem_" + tag, to_report(main, b)});
  return m;
}

Outcome soi_verify(Runner& run, std::optional<int> n, std::optional<int> nx, std::optional<int> ny) {
  if (n && (nx || ny)) throw UsageError("use either --n or --nx/--ny");
  if (!n && !(nx && ny)) throw UsageError("give --n, or both --nx and --ny");
  const int a = n ? *n : *nx;
  const int c = n ? *n : *ny;
  Outcome out;
  out.params = {{"n_x", a}, {"n_y", c}};
  soi_verify_into(run, a, c, out, run.pins().line(PinStore::kMainTheorem),
                  run.pins().integer(PinStore::kChainRule), run.pinning());
  return out;
}

// ---- lambalgen -------------------------------------------------------------

Outcome verify_t2(Runner& run, int n, std::optional<int> c_max) {
  const Bounds b = run.bounds(literal_bound(2 * n, kolm::Mode::kPlain));
  const auto pin = run.pinning() ? std::nullopt : run.pins().line(PinStore::kTheorem2);
  const auto r = kolm::verify_theorem2(run.engine(), n, c_max.value_or(n), b, pin);
  Outcome out;
  out.params = {{"n", n}, {"c_max", c_max.value_or(n)}};
  if (run.pinning() && r.fitted) {
    run.pins().set_line(PinStore::kTheorem2, *r.fitted, {{"n", n}, {"bounds", bounds_json(b)}});
    out.notes.push_back("pinned theorem2 a=" + kolm::fmt_double(r.fitted->a) + " b=" + kolm::fmt_double(r.fitted->b));
  }
  out.sections.push_back({"theorem2_n" + std::to_string(n), to_report(r, b)});
  return out;
}

Outcome verify_t3(Runner& run, int n, std::optional<int> c_max, const kolm::DecoderCostModel& costs,
                  const std::string& offset_text) {
  const Bounds b = run.bounds(literal_bound(2 * n, kolm::Mode::kPrefixFree));
  const auto pin = run.pinning() ? std::nullopt : run.pins().line(PinStore::kTheorem3);
  const auto r = kolm::verify_theorem3_empirical(run.engine(), n, c_max.value_or(n), b, pin);
  int offset = 0;
  if (offset_text == "auto") {
    offset = kolm::k_overhead(run.engine(), n, b);
  } else {
    try {
      offset = std::stoi(offset_text);
    } catch (const std::exception&) {
      throw UsageError("--offset must be an integer or 'auto'");
    }
  }
  const auto s = kolm::verify_theorem3_structure(run.engine(), n, c_max.value_or(n), b, costs, offset);
  Outcome out;
  out.params = {{"n", n}, {"c_max", c_max.value_or(n)}, {"c1", costs.c1}, {"c2", costs.c2}, {"offset", offset}};
  if (run.pinning() && r.fitted) {
    run.pins().set_line(PinStore::kTheorem3, *r.fitted, {{"n", n}, {"bounds", bounds_json(b)}});
    out.notes.push_back("pinned theorem3 a=" + kolm::fmt_double(r.fitted->a) + " b=" + kolm::fmt_double(r.fitted->b));
  }
  out.sections.push_back({"theorem3-empirical_n" + std::to_string(n), to_report(r, b)});
  out.sections.push_back({"theorem3-structure_n" + std::to_string(n), to_report(s, b)});
  return out;
}

Outcome lambalgen_sets(Runner& run, int n, int d, int offset) {
  const Bounds b = run.bounds(literal_bound(2 * n, kolm::Mode::kPrefixFree));
  Outcome out;
  out.params = {{"n", n}, {"d", d}, {"offset", offset}};
  out.sections.push_back({"sets_n" + std::to_string(n) + "_d" + std::to_string(d),
                          kolm::sets_report(kolm::deficiency_sets(run.engine(), n, d, b, offset), b)});
  return out;
}

// ---- witness ---------------------------------------------------------------

Outcome witness(Runner& run, int n_y) {
  const int x_bits = static_cast<int>(BitString::bin(n_y).size());
  const Bounds b = run.bounds(literal_bound(x_bits + n_y, kolm::Mode::kPlain));
  const auto w = kolm::find_asymmetry_witness(run.engine(), n_y, b);
  Outcome out;
  out.params = {{"n_y", n_y}};
  std::optional<int> pin;
  if (run.pinning()) {
    run.pins().set_integer(PinStore::kWitnessGap, w.gap, {{"n_y", n_y}, {"bounds", bounds_json(b)}});
    out.notes.push_back("pinned witness_gap0 = " + std::to_string(w.gap));
  } else {
    pin = run.pins().integer(PinStore::kWitnessGap);
  }
  out.sections.push_back({"witness_ny" + std::to_string(n_y), to_report(w, b, pin)});
  return out;
}

// ---- report bundle ----------------------------------------------------------

// The desk-scale battery: constants come from the pin file when present,
// otherwise from the n = 3 runs of this same invocation.
Outcome bundle(Runner& run) {
  Outcome out;
  PinStore& pins = run.pins();
  auto main_pin = pins.line(PinStore::kMainTheorem);
  auto chain_pin = pins.integer(PinStore::kChainRule);
  auto t2_pin = pins.line(PinStore::kTheorem2);
  auto t3_pin = pins.line(PinStore::kTheorem3);
  auto gap_pin = pins.integer(PinStore::kWitnessGap);
  const bool from_file = main_pin.has_value();
  out.params = {{"pin_source", from_file ? "pin file" : "same-run n=3 fit"}};
  std::size_t primary = 0;

  const Measured small = soi_verify_into(run, 3, 3, out, main_pin, chain_pin, false);
  if (!main_pin) main_pin = small.main_fit;
  if (!chain_pin) chain_pin = small.chain_b;
  for (auto [nx, ny] : {std::pair{4, 4}, std::pair{3, 5}}) {
    soi_verify_into(run, nx, ny, out, main_pin, chain_pin, false);
    if (nx == 4) primary = out.primary;
  }

  for (int n : {3, 4}) {
    const Bounds b = run.bounds(literal_bound(2 * n, kolm::Mode::kPlain));
    const auto r = kolm::verify_theorem2(run.engine(), n, n, b, n == 3 ? std::nullopt : t2_pin);
    if (!t2_pin) t2_pin = r.fitted;
    out.sections.push_back({"theorem2_n" + std::to_string(n), to_report(r, b)});
  }
  for (int n : {3, 4}) {
    const Bounds b = run.bounds(literal_bound(2 * n, kolm::Mode::kPrefixFree));
    const auto r = kolm::verify_theorem3_empirical(run.engine(), n, n, b, n == 3 ? std::nullopt : t3_pin);
    if (!t3_pin) t3_pin = r.fitted;
    out.sections.push_back({"theorem3-empirical_n" + std::to_string(n), to_report(r, b)});
  }
  {
    const Bounds b = run.bounds(literal_bound(6, kolm::Mode::kPrefixFree));
    out.sections.push_back({"theorem3-structure_n3",
                            to_report(kolm::verify_theorem3_structure(run.engine(), 3, 3, b), b)});
    const int offset = kolm::k_overhead(run.engine(), 3, b);
    out.sections.push_back(
        {"theorem3-structure_n3_offset",
         to_report(kolm::verify_theorem3_structure(run.engine(), 3, 3, b, {}, offset), b)});
  }
  {
    const Bounds b = run.bounds(literal_bound(9, kolm::Mode::kPlain));
    const auto w = kolm::find_asymmetry_witness(run.engine(), 6, b);
    out.sections.push_back({"witness_ny6", to_report(w, b, gap_pin.value_or(w.gap))});
  }
  out.primary = primary;
  return out;
}

// ---- output ----------------------------------------------------------------

std::string iso_now() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

int emit(const Global& g, const std::string& command, const std::vector<std::string>& argv,
         const Outcome& out, double seconds, const Bounds& nominal) {
  bool passed = true;
  std::size_t failures = 0;
  for (const auto& s : out.sections) {
    passed = passed && s.report.passed();
    failures += s.report.failures.size();
  }
  const bool csv = g.format == "csv";

  if (out.stdout_text) {
    std::cout << *out.stdout_text;
  } else if (csv) {
    std::cout << kolm::render_csv(out.sections[out.primary].report);
  } else {
    for (const auto& s : out.sections) std::cout << kolm::render_structured(s.report);
  }
  for (const auto& note : out.notes) std::cerr << note << '\n';
  for (const auto& s : out.sections) {
    for (const auto& f : s.report.failures) std::cerr << "FAIL [" << s.stem << "] " << f << '\n';
  }

  const std::filesystem::path dir(g.out_dir);
  std::filesystem::create_directories(dir);
  nlohmann::json files = nlohmann::json::array();
  std::string stem = command;
  for (auto& ch : stem) {
    if (ch == ' ') ch = '-';
  }
  nlohmann::json lengths = nlohmann::json::object();
  for (const auto& s : out.sections) {
    for (const auto& [k, v] : s.report.summary) {
      if (k == "max_len") lengths[s.stem] = std::stoi(v);
    }
    const auto path = dir / (stem + "." + s.stem + (csv ? ".csv" : ".txt"));
    std::ofstream(path) << (csv ? kolm::render_csv(s.report) : kolm::render_structured(s.report));
    files.push_back(path.filename().string());
  }
  nlohmann::json manifest = {
      {"command", command},
      {"argv", argv},
      {"params", out.params},
      {"global",
       {{"cache_dir", g.cache_dir},
        {"mode", g.mode},
        {"workers", g.workers},
        {"format", g.format},
        {"pin_file", g.pin_file},
        {"pin", g.pin}}},
      {"machine", kolm::machine_fingerprint_hex()},
      {"bounds", {{"max_len_by_report", lengths},
                  {"fuel", nominal.cfg.fuel},
                  {"output_cap", nominal.cfg.output_cap}}},
      {"started_at", iso_now()},
      {"wall_clock_seconds", seconds},
      {"passed", passed},
      {"failures", failures},
      {"reports", files}};
  std::ofstream(dir / (stem + ".manifest.json")) << manifest.dump(2) << '\n';
  return passed ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kolmlab: exhaustive Kolmogorov-complexity experiments on a fixed toy machine"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  if (const char* env = std::getenv("KOLM_CACHE_DIR")) g.cache_dir = env;
  app.add_option("--cache-dir", g.cache_dir, "Table cache directory (default $KOLM_CACHE_DIR)");
  app.add_option("--max-len", g.max_len, "Program length bound L (default depends on the command)")
      ->check(CLI::Range(0, 64));
  app.add_option("--fuel", g.fuel, "Step budget per program")->check(CLI::PositiveNumber);
  app.add_option("--output-cap", g.output_cap, "Output length cap")->check(CLI::PositiveNumber);
  app.add_option("--mode", g.mode, "plain or prefix (table commands)")
      ->check(CLI::IsMember({"plain", "prefix"}));
  app.add_option("--workers", g.workers, "Worker threads for table builds")->check(CLI::Range(1u, 256u));
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"structured", "csv"}));
  app.add_option("--pin-file", g.pin_file, "JSON file of pinned constants");
  app.add_flag("--pin", g.pin, "Record this run's fitted constants in --pin-file (never overwrites)");
  app.add_option("--out-dir", g.out_dir, "Directory for report files and the run manifest");

  std::string x, y, cond;
  std::vector<std::string> items;
  std::optional<int> n, nx, ny, c_max;
  int d = 0, offset = 0, n_y = 6;
  std::string offset_text = "0";
  kolm::DecoderCostModel costs;

  auto* table = app.add_subcommand("table", "Build or query complexity tables");
  table->require_subcommand(1);
  auto* t_build = table->add_subcommand("build", "Build (or load) one table and report its counts");
  t_build->add_option("--cond", cond, "Condition bits (raw)");
  auto* t_query = table->add_subcommand("query", "Print C(x | condition) or ABOVE_BOUND");
  t_query->add_option("--x", x, "String x")->required();
  t_query->add_option("--cond", cond, "Condition bits (raw)");
  t_query->add_option("--item", items, "Condition item; several are packed with length prefixes");

  auto* soi = app.add_subcommand("soi", "Symmetry-of-information checks");
  soi->require_subcommand(1);
  auto* s_profile = soi->add_subcommand("profile", "Information profile of one pair");
  s_profile->add_option("--x", x)->required();
  s_profile->add_option("--y", y)->required();
  auto* s_grid = soi->add_subcommand("grid", "Cell grid of one pair at t = C(xy | n_x, n_y)");
  s_grid->add_option("--x", x)->required();
  s_grid->add_option("--y", y)->required();
  auto* s_verify = soi->add_subcommand("verify", "Counting bounds, chain rule and main theorem sweep");
  s_verify->add_option("--n", n, "n_x = n_y = n");
  s_verify->add_option("--nx", nx);
  s_verify->add_option("--ny", ny);

  auto* lam = app.add_subcommand("lambalgen", "Finite van Lambalgen checks");
  lam->require_subcommand(1);
  auto* l_t2 = lam->add_subcommand("verify-t2", "Plain-complexity deficiency regression");
  l_t2->add_option("--n", n)->required();
  l_t2->add_option("--c-max", c_max, "Largest c (default n)");
  auto* l_t3 = lam->add_subcommand("verify-t3", "Prefix-free regression and the set/decoder checks");
  l_t3->add_option("--n", n)->required();
  l_t3->add_option("--c-max", c_max, "Largest c (default n)");
  l_t3->add_option("--c1", costs.c1, "Accounting length of p1");
  l_t3->add_option("--c2", costs.c2, "Accounting length of p2");
  l_t3->add_option("--offset", offset_text, "Threshold offset for the sets: integer or 'auto'");
  auto* l_sets = lam->add_subcommand("sets", "A_u(d) and F(d) at one (n, d)");
  l_sets->add_option("--n", n)->required();
  l_sets->add_option("--d", d)->required();
  l_sets->add_option("--offset", offset, "Threshold offset")->check(CLI::NonNegativeNumber);

  auto* wit = app.add_subcommand("witness", "Search x = bin(n_y) against all y for the largest I(y:x) - I(x:y)");
  wit->add_option("--n-y", n_y, "Length of y")->check(CLI::Range(1, 13));

  auto* rep = app.add_subcommand("report", "Run the whole desk-scale battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  std::string command;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (g.pin && g.pin_file.empty()) throw UsageError("--pin needs --pin-file");
    Runner run(g);
    Outcome out;
    if (t_build->parsed()) {
      command = "table build";
      out = table_build(run, cond);
    } else if (t_query->parsed()) {
      command = "table query";
      out = table_query(run, x, cond, items);
    } else if (s_profile->parsed()) {
      command = "soi profile";
      out = soi_profile(run, x, y);
    } else if (s_grid->parsed()) {
      command = "soi grid";
      out = soi_grid(run, x, y);
    } else if (s_verify->parsed()) {
      command = "soi verify";
      out = soi_verify(run, n, nx, ny);
    } else if (l_t2->parsed()) {
      command = "lambalgen verify-t2";
      out = verify_t2(run, *n, c_max);
    } else if (l_t3->parsed()) {
      command = "lambalgen verify-t3";
      out = verify_t3(run, *n, c_max, costs, offset_text);
    } else if (l_sets->parsed()) {
      command = "lambalgen sets";
      out = lambalgen_sets(run, *n, d, offset);
    } else if (wit->parsed()) {
      command = "witness";
      out = witness(run, n_y);
    } else if (rep->parsed()) {
      command = "report";
      if (g.pin) throw UsageError("report does not pin; pin with the individual commands");
      out = bundle(run);
    }
    run.save_pins();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(g, command, args, out, seconds, run.bounds(kolm::Bounds{}.max_len));
  } catch (const UsageError& e) {
    std::cerr << "kolmlab: " << e.what() << '\n';
  } catch (const kolm::Error& e) {
    std::cerr << "kolmlab: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "kolmlab: " << e.what() << '\n';
  }
  return kExitUsage;
}
