#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kolm/complexity.h"

namespace kolm {

// A measured linear bound value <= a*g + b. The constants of the theorems
// are machine-relative, so they are fitted at one size and asserted at others.
struct LinearPin {
  double a = 0;
  double b = 0;

  bool holds(double g, double value) const { return value <= a * g + b + kTolerance; }

  static constexpr double kTolerance = 1e-9;
};

// Tightest pin over the sample: minimises the total slack sum(a*g + b - v)
// over the distinct g values (keeping the largest v per g) subject to
// a*g + b >= v everywhere and a >= 0. Ties go to the smaller slope.
// Requires a non-empty sample.
LinearPin fit_upper_line(const std::vector<std::pair<double, double>>& points);

// log2(1 + v) for v >= 0, and 0 for v <= 0 (the "log 0 = 0" convention
// shifted so the term stays monotone).
double log_term(double v);

std::string fmt_complexity(const Complexity& c);
std::string fmt_double(double v);

// Plain-text report: ordered summary block, a record table and a failure
// list. Rendering is deterministic (no timestamps, no worker counts).
struct Report {
  std::string name;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
  void add(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
  void add(const std::string& key, std::int64_t value) { add(key, std::to_string(value)); }
  void fail(const std::string& what) { failures.push_back(what); }
};

// Structured form:
//   [report <name>]
//   key = value            (summary, in insertion order)
//   [records <n>]
//   col=val col=val ...    (one line per record)
//   [failures <n>]
//   <failure>
//   [end <name> pass|fail]
std::string render_structured(const Report& r);
// Header line of the columns followed by one row per record.
std::string render_csv(const Report& r);

}  // namespace kolm
