#include "kolm/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kolm {

LinearPin fit_upper_line(const std::vector<std::pair<double, double>>& points) {
  if (points.empty()) throw std::invalid_argument("fit_upper_line: empty sample");
  std::map<double, double> top;
  for (const auto& [g, v] : points) {
    auto [it, fresh] = top.emplace(g, v);
    if (!fresh) it->second = std::max(it->second, v);
  }
  const std::vector<std::pair<double, double>> pts(top.begin(), top.end());

  auto feasible = [&](const LinearPin& p) {
    return std::all_of(pts.begin(), pts.end(), [&](const auto& q) { return p.holds(q.first, q.second); });
  };
  auto slack = [&](const LinearPin& p) {
    double s = 0;
    for (const auto& [g, v] : pts) s += p.a * g + p.b - v;
    return s;
  };

  // Vertices of the feasible region: a = 0 with one tight point, or two
  // tight points.
  double best_v = -std::numeric_limits<double>::infinity();
  for (const auto& [g, v] : pts) best_v = std::max(best_v, v);
  LinearPin best{0, best_v};
  double best_slack = slack(best);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double a = (pts[j].second - pts[i].second) / (pts[j].first - pts[i].first);
      if (a < 0) continue;
      const LinearPin cand{a, pts[i].second - a * pts[i].first};
      if (!feasible(cand)) continue;
      const double s = slack(cand);
      if (s < best_slack - LinearPin::kTolerance ||
          (std::abs(s - best_slack) <= LinearPin::kTolerance && cand.a < best.a)) {
        best = cand;
        best_slack = s;
      }
    }
  }
  return best;
}

double log_term(double v) { return v <= 0 ? 0.0 : std::log2(1.0 + v); }

std::string fmt_complexity(const Complexity& c) { return c ? std::to_string(*c) : "ABOVE_BOUND"; }

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string render_structured(const Report& r) {
  std::ostringstream out;
  out << "[report " << r.name << "]\n";
  for (const auto& [k, v] : r.summary) out << k << " = " << v << '\n';
  out << "[records " << r.records.size() << "]\n";
  for (const auto& row : r.records) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ' ';
      out << (i < r.columns.size() ? r.columns[i] : "col" + std::to_string(i)) << '=' << row[i];
    }
    out << '\n';
  }
  out << "[failures " << r.failures.size() << "]\n";
  for (const auto& f : r.failures) out << f << '\n';
  out << "[end " << r.name << ' ' << (r.passed() ? "pass" : "fail") << "]\n";
  return out.str();
}

std::string render_csv(const Report& r) {
  std::ostringstream out;
  for (std::size_t i = 0; i < r.columns.size(); ++i) out << (i ? "," : "") << r.columns[i];
  out << '\n';
  for (const auto& row : r.records) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace kolm
