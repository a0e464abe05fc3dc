#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kolm/bitstring.h"
#include "kolm/error.h"
#include "kolm/machine.h"

namespace kolm {

// Length-bounded complexity; std::nullopt is ABOVE_BOUND (no program of
// length <= L produced the string). Never conflated with a large number.
using Complexity = std::optional<int>;

inline constexpr int kDefaultLengthGuard = 24;
inline constexpr int kPairGuard = 14;

struct Bounds {
  int max_len = 18;
  MachineConfig cfg;

  bool operator==(const Bounds&) const = default;
};

struct TableKey {
  BitString condition;
  Mode mode = Mode::kPlain;
  int max_len = 0;
  MachineConfig cfg;
  std::uint64_t fingerprint = machine_fingerprint();

  bool operator==(const TableKey&) const = default;
  friend bool operator<(const TableKey& a, const TableKey& b);

  // Stable 16-hex-digit digest, used as the cache file name.
  std::string digest() const;
};

class ComplexityTable {
 public:
  using Entries = std::unordered_map<BitString, int>;

  ComplexityTable(TableKey key, Entries entries) : key_(std::move(key)), entries_(std::move(entries)) {}

  const TableKey& key() const { return key_; }
  Complexity lookup(const BitString& x) const {
    auto it = entries_.find(x);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t size() const { return entries_.size(); }
  const Entries& entries() const { return entries_; }
  // Entries in shortlex order of the output string.
  std::vector<std::pair<BitString, int>> sorted_entries() const;
  // Number of outputs with complexity <= t.
  std::size_t count_at_most(int t) const;

  friend bool operator==(const ComplexityTable& a, const ComplexityTable& b) {
    return a.key_ == b.key_ && a.entries_ == b.entries_;
  }

 private:
  TableKey key_;
  Entries entries_;
};

struct BuildOptions {
  unsigned workers = 1;
  int length_guard = kDefaultLengthGuard;
};

struct BuildStats {
  std::uint64_t programs_run = 0;  // complete instruction sequences visited
  std::uint64_t max_halt_cost = 0;
};

// Enumerates every valid program of length <= L by generating instruction
// sequences directly and executing them incrementally; subtrees whose
// execution already failed are pruned. Throws Error(kBoundTooLarge) when L
// exceeds the guard.
ComplexityTable build_table(const BitString& condition, Mode mode, int max_len,
                            const MachineConfig& cfg, const BuildOptions& options = {},
                            BuildStats* stats = nullptr);

void save_table(const ComplexityTable& table, const std::filesystem::path& path);
// Throws Error(kCorruptCache) on malformed or truncated files and
// Error(kFingerprintMismatch) when the file was built for another machine.
ComplexityTable load_table(const std::filesystem::path& path);
ComplexityTable load_table(const std::filesystem::path& path, const TableKey& expected);

// C(uv | n_x, n_y) for every u in {0,1}^n_x, v in {0,1}^n_y, row-major.
struct PairGrid {
  int n_x = 0;
  int n_y = 0;
  std::vector<Complexity> cells;

  std::size_t rows() const { return std::size_t{1} << n_x; }
  std::size_t cols() const { return std::size_t{1} << n_y; }
  Complexity at(std::size_t u, std::size_t v) const { return cells[u * cols() + v]; }
};

// Owns every table the verifiers need, memoized in memory and optionally on
// disk. Safe for concurrent use; tables are immutable once published.
class ComplexityEngine {
 public:
  struct Options {
    unsigned workers = 1;
    int length_guard = kDefaultLengthGuard;
    std::optional<std::filesystem::path> cache_dir;
  };

  ComplexityEngine() = default;
  explicit ComplexityEngine(Options options) : options_(std::move(options)) {}

  const Options& options() const { return options_; }

  std::shared_ptr<const ComplexityTable> table(const BitString& condition, Mode mode,
                                               const Bounds& bounds);

  // C(x | items) or K(x | items) through pack_condition(items).
  Complexity complexity_of(const BitString& x, std::span<const BitString> items, Mode mode,
                           const Bounds& bounds);
  Complexity complexity_of(const BitString& x, std::initializer_list<BitString> items, Mode mode,
                           const Bounds& bounds) {
    return complexity_of(x, std::span<const BitString>(items.begin(), items.size()), mode, bounds);
  }

  // C(C(x | n_x) | n_x); throws Error(kAboveBound) if C(x | n_x) is above bound.
  Complexity second_order_complexity(const BitString& x, const Bounds& bounds,
                                     Mode mode = Mode::kPlain);

  PairGrid pair_grid(int n_x, int n_y, Mode mode, const Bounds& bounds);

  std::size_t tables_built() const;
  // Every table held in memory, in key order.
  std::vector<std::shared_ptr<const ComplexityTable>> tables() const;

 private:
  Options options_;
  mutable std::mutex mu_;
  std::map<TableKey, std::shared_ptr<const ComplexityTable>> memo_;
  std::size_t built_ = 0;
};

// Free-function form of ComplexityEngine::pair_grid with a throwaway engine.
PairGrid build_pair_grid(int n_x, int n_y, Mode mode, const Bounds& bounds,
                         const BuildOptions& options = {});

}  // namespace kolm
