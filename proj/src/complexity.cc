#include "kolm/complexity.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include "kolm/codes.h"

namespace kolm {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Depth at which the program tree is dealt out to workers round-robin.
// Shallower nodes are visited by every worker but recorded only by worker 0;
// the deal counter only advances on successful steps, so every worker sees
// the same sequence.
constexpr int kSplitDepth = 2;

class Enumerator {
 public:
  Enumerator(const BitString& condition, Mode mode, int max_len, const MachineConfig& cfg,
             unsigned worker, unsigned workers)
      : mode_(mode), max_len_(max_len), state_(condition, cfg), worker_(worker), workers_(workers) {}

  void run() { visit(0, 0); }

  ComplexityTable::Entries take_entries() { return std::move(entries_); }
  const BuildStats& stats() const { return stats_; }

 private:
  bool owns_subtree(int depth) {
    if (depth != kSplitDepth) return true;
    return (split_counter_++ % workers_) == worker_;
  }

  bool records_at(int depth) const { return depth >= kSplitDepth || worker_ == 0; }

  void record(int len) {
    stats_.max_halt_cost = std::max(stats_.max_halt_cost, state_.cost());
    auto [it, inserted] = entries_.try_emplace(state_.output(), len);
    if (!inserted && len < it->second) it->second = len;
  }

  // Node: a complete instruction sequence of `len` bits, executed without
  // failure, not ending in HALT.
  void visit(int len, int depth) {
    if (records_at(depth)) {
      ++stats_.programs_run;
      if (mode_ == Mode::kPlain) record(len);
    }
    try_child(len, depth, Instruction{Mnemonic::kCopyAll, 0, {}});
    try_child(len, depth, Instruction{Mnemonic::kRewind, 0, {}});
    try_child(len, depth, Instruction{Mnemonic::kDup, 0, {}});
    if (mode_ == Mode::kPrefixFree) try_halt(len, depth);
    operand_children(len, depth, Mnemonic::kZeros);
    operand_children(len, depth, Mnemonic::kCopy);
    operand_children(len, depth, Mnemonic::kSkip);
    operand_children(len, depth, Mnemonic::kFlip);
    operand_children(len, depth, Mnemonic::kLit);
  }

  // Returns false when the instruction failed (callers use this to stop
  // scanning operands, since failures are monotone in the operand).
  bool try_child(int len, int depth, const Instruction& ins) {
    const int next = len + static_cast<int>(encoded_length(ins));
    if (next > max_len_) return true;
    const auto cp = state_.checkpoint();
    const bool ok = state_.step(ins) == FailReason::kNone;
    if (ok && owns_subtree(depth + 1)) visit(next, depth + 1);
    state_.restore(cp);
    return ok;
  }

  void try_halt(int len, int depth) {
    const Instruction halt{Mnemonic::kHalt, 0, {}};
    const int next = len + static_cast<int>(encoded_length(halt));
    if (next > max_len_) return;
    const auto cp = state_.checkpoint();
    if (state_.step(halt) == FailReason::kNone && owns_subtree(depth + 1) &&
        records_at(depth + 1)) {
      ++stats_.programs_run;
      record(next);
    }
    state_.restore(cp);
  }

  void operand_children(int len, int depth, Mnemonic m) {
    Instruction ins{m, 0, {}};
    for (std::uint64_t k = 0;; ++k) {
      ins.operand = k;
      if (m == Mnemonic::kLit) ins.payload = BitString::fixed_width(0, k);
      if (len + static_cast<int>(encoded_length(ins)) > max_len_) return;
      if (m == Mnemonic::kLit) {
        // All payloads of one width cost the same, so they fail together.
        bool ok = true;
        for (std::uint64_t bits = 0; ok && bits < (std::uint64_t{1} << k); ++bits) {
          ins.payload = BitString::fixed_width(bits, k);
          ok = try_child(len, depth, ins);
        }
        if (!ok) return;
      } else if (!try_child(len, depth, ins)) {
        return;
      }
    }
  }

  Mode mode_;
  int max_len_;
  MachineState state_;
  unsigned worker_;
  unsigned workers_;
  std::uint64_t split_counter_ = 0;
  ComplexityTable::Entries entries_;
  BuildStats stats_;
};

}  // namespace

bool operator<(const TableKey& a, const TableKey& b) {
  return std::tie(a.condition, a.mode, a.max_len, a.cfg.fuel, a.cfg.output_cap, a.fingerprint) <
         std::tie(b.condition, b.mode, b.max_len, b.cfg.fuel, b.cfg.output_cap, b.fingerprint);
}

std::string TableKey::digest() const {
  std::ostringstream s;
  s << hex64(fingerprint) << '|' << mode_name(mode) << '|' << max_len << '|' << cfg.fuel << '|'
    << cfg.output_cap << '|' << condition.to_hex();
  return hex64(fnv1a(s.str()));
}

std::vector<std::pair<BitString, int>> ComplexityTable::sorted_entries() const {
  std::vector<std::pair<BitString, int>> out(entries_.begin(), entries_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t ComplexityTable::count_at_most(int t) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [t](const auto& e) { return e.second <= t; }));
}

ComplexityTable build_table(const BitString& condition, Mode mode, int max_len,
                            const MachineConfig& cfg, const BuildOptions& options,
                            BuildStats* stats) {
  if (max_len < 0 || max_len > options.length_guard) {
    throw Error(Errc::kBoundTooLarge, "max_len " + std::to_string(max_len) + " outside [0, " +
                                          std::to_string(options.length_guard) + "]");
  }
  const unsigned workers = std::max(1u, options.workers);
  std::vector<ComplexityTable::Entries> partial(workers);
  std::vector<BuildStats> partial_stats(workers);
  auto work = [&](unsigned w) {
    Enumerator e(condition, mode, max_len, cfg, w, workers);
    e.run();
    partial[w] = e.take_entries();
    partial_stats[w] = e.stats();
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
  }

  // Min-reduction; independent of worker count and merge order.
  ComplexityTable::Entries merged = std::move(partial[0]);
  BuildStats total = partial_stats[0];
  for (unsigned w = 1; w < workers; ++w) {
    for (auto& [out, len] : partial[w]) {
      auto [it, inserted] = merged.try_emplace(out, len);
      if (!inserted && len < it->second) it->second = len;
    }
    total.programs_run += partial_stats[w].programs_run;
    total.max_halt_cost = std::max(total.max_halt_cost, partial_stats[w].max_halt_cost);
  }
  if (stats) *stats = total;
  return ComplexityTable(TableKey{condition, mode, max_len, cfg, machine_fingerprint()},
                         std::move(merged));
}

namespace {

constexpr const char* kMagic = "kolm-table";
constexpr int kFormatVersion = 1;

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& why) {
  throw Error(Errc::kCorruptCache, path.string() + ": " + why);
}

}  // namespace

void save_table(const ComplexityTable& table, const std::filesystem::path& path) {
  const TableKey& key = table.key();
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << kMagic << ' ' << kFormatVersion << '\n'
        << "fingerprint " << hex64(key.fingerprint) << '\n'
        << "mode " << mode_name(key.mode) << '\n'
        << "max_len " << key.max_len << '\n'
        << "fuel " << key.cfg.fuel << '\n'
        << "output_cap " << key.cfg.output_cap << '\n'
        << "condition " << key.condition.to_hex() << '\n'
        << "entries " << table.size() << '\n';
    for (const auto& [x, len] : table.sorted_entries()) out << x.to_hex() << ' ' << len << '\n';
    out << "end\n";
    if (!out) throw std::runtime_error("short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

ComplexityTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) corrupt(path, "cannot open");
  auto field = [&](const char* name) {
    std::string line;
    if (!std::getline(in, line)) corrupt(path, std::string("missing ") + name);
    const std::string prefix = std::string(name) + " ";
    if (line.rfind(prefix, 0) != 0) corrupt(path, std::string("expected ") + name);
    return line.substr(prefix.size());
  };
  auto number = [&](const std::string& text) {
    std::uint64_t v = 0;
    std::size_t used = 0;
    try {
      v = std::stoull(text, &used);
    } catch (const std::exception&) {
      corrupt(path, "bad number '" + text + "'");
    }
    if (used != text.size()) corrupt(path, "bad number '" + text + "'");
    return v;
  };

  if (field(kMagic) != std::to_string(kFormatVersion)) corrupt(path, "unsupported version");
  TableKey key;
  const std::string fp = field("fingerprint");
  const auto mode = parse_mode(field("mode"));
  if (!mode) corrupt(path, "bad mode");
  key.mode = *mode;
  key.max_len = static_cast<int>(number(field("max_len")));
  key.cfg.fuel = number(field("fuel"));
  key.cfg.output_cap = number(field("output_cap"));
  try {
    key.condition = BitString::from_hex(field("condition"));
  } catch (const std::invalid_argument& e) {
    corrupt(path, e.what());
  }
  if (fp != machine_fingerprint_hex()) {
    throw Error(Errc::kFingerprintMismatch,
                path.string() + ": built for machine " + fp + ", current " + machine_fingerprint_hex());
  }
  const std::uint64_t count = number(field("entries"));

  ComplexityTable::Entries entries;
  std::string line;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) corrupt(path, "truncated entries");
    const auto space = line.find(' ');
    if (space == std::string::npos) corrupt(path, "bad entry line");
    BitString x;
    try {
      x = BitString::from_hex(line.substr(0, space));
    } catch (const std::invalid_argument& e) {
      corrupt(path, e.what());
    }
    const std::uint64_t len = number(line.substr(space + 1));
    if (len > static_cast<std::uint64_t>(key.max_len)) corrupt(path, "entry above max_len");
    if (!entries.emplace(std::move(x), static_cast<int>(len)).second) corrupt(path, "duplicate entry");
  }
  if (!std::getline(in, line) || line != "end") corrupt(path, "missing end marker");
  return ComplexityTable(std::move(key), std::move(entries));
}

ComplexityTable load_table(const std::filesystem::path& path, const TableKey& expected) {
  ComplexityTable t = load_table(path);
  if (!(t.key() == expected)) corrupt(path, "table key does not match the requested key");
  return t;
}

std::shared_ptr<const ComplexityTable> ComplexityEngine::table(const BitString& condition, Mode mode,
                                                               const Bounds& bounds) {
  const TableKey key{condition, mode, bounds.max_len, bounds.cfg, machine_fingerprint()};
  std::lock_guard lock(mu_);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  std::shared_ptr<const ComplexityTable> result;
  std::filesystem::path file;
  if (options_.cache_dir) {
    file = *options_.cache_dir / (key.digest() + ".ktab");
    if (std::filesystem::exists(file)) {
      result = std::make_shared<const ComplexityTable>(load_table(file, key));
    }
  }
  if (!result) {
    result = std::make_shared<const ComplexityTable>(build_table(
        condition, mode, bounds.max_len, bounds.cfg, {options_.workers, options_.length_guard}));
    ++built_;
    if (options_.cache_dir) {
      std::filesystem::create_directories(*options_.cache_dir);
      save_table(*result, file);
    }
  }
  memo_.emplace(key, result);
  return result;
}

Complexity ComplexityEngine::complexity_of(const BitString& x, std::span<const BitString> items,
                                           Mode mode, const Bounds& bounds) {
  return table(pack_condition(items), mode, bounds)->lookup(x);
}

Complexity ComplexityEngine::second_order_complexity(const BitString& x, const Bounds& bounds,
                                                     Mode mode) {
  const BitString n = BitString::bin(x.size());
  const Complexity t = complexity_of(x, {n}, mode, bounds);
  if (!t) {
    throw Error(Errc::kAboveBound, "C(" + x.to_string() + " | n) is above bound L=" +
                                       std::to_string(bounds.max_len));
  }
  return complexity_of(BitString::bin(static_cast<std::uint64_t>(*t)), {n}, mode, bounds);
}

PairGrid ComplexityEngine::pair_grid(int n_x, int n_y, Mode mode, const Bounds& bounds) {
  if (n_x < 0 || n_y < 0 || n_x + n_y > kPairGuard) {
    throw Error(Errc::kBoundTooLarge, "pair grid needs n_x + n_y <= " + std::to_string(kPairGuard));
  }
  const auto t = table(pack_condition({BitString::bin(n_x), BitString::bin(n_y)}), mode, bounds);
  PairGrid grid{n_x, n_y, {}};
  grid.cells.reserve(grid.rows() * grid.cols());
  for (std::size_t u = 0; u < grid.rows(); ++u) {
    const BitString row = BitString::fixed_width(u, n_x);
    for (std::size_t v = 0; v < grid.cols(); ++v) {
      grid.cells.push_back(t->lookup(row + BitString::fixed_width(v, n_y)));
    }
  }
  return grid;
}

std::vector<std::shared_ptr<const ComplexityTable>> ComplexityEngine::tables() const {
  std::lock_guard lock(mu_);
  std::vector<std::shared_ptr<const ComplexityTable>> out;
  out.reserve(memo_.size());
  for (const auto& [key, table] : memo_) out.push_back(table);
  return out;
}

std::size_t ComplexityEngine::tables_built() const {
  std::lock_guard lock(mu_);
  return built_;
}

PairGrid build_pair_grid(int n_x, int n_y, Mode mode, const Bounds& bounds,
                         const BuildOptions& options) {
  ComplexityEngine engine({options.workers, options.length_guard, std::nullopt});
  return engine.pair_grid(n_x, n_y, mode, bounds);
}

}  // namespace kolm
