#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "kolm/error.h"
#include "kolm/machine.h"
#include "kolm/pins.h"
#include "kolm/report.h"

using kolm::LinearPin;

namespace {

double total_slack(const std::vector<std::pair<double, double>>& pts, double a, double b) {
  double s = 0;
  for (const auto& [g, v] : pts) s += a * g + b - v;
  return s;
}

// Grid search over a: for each slope the best intercept is the max residual.
double brute_force_min_slack(const std::vector<std::pair<double, double>>& pts) {
  double best = 1e300;
  for (int i = 0; i <= 20000; ++i) {
    const double a = i / 1000.0;
    double b = -1e300;
    for (const auto& [g, v] : pts) b = std::max(b, v - a * g);
    best = std::min(best, total_slack(pts, a, b));
  }
  return best;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("kolm_report_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("log term") {
  CHECK(kolm::log_term(0) == 0);
  CHECK(kolm::log_term(-3) == 0);
  CHECK(kolm::log_term(1) == doctest::Approx(1));
  CHECK(kolm::log_term(3) == doctest::Approx(2));
}

TEST_CASE("fit of degenerate samples") {
  auto p = kolm::fit_upper_line({{2.0, 5.0}});
  CHECK(p.a == 0);
  CHECK(p.b == 5);
  p = kolm::fit_upper_line({{1.0, 1.0}, {1.0, 4.0}, {1.0, 2.0}});
  CHECK(p.a == 0);
  CHECK(p.b == 4);
  // Decreasing data: the slope stays at 0.
  p = kolm::fit_upper_line({{0.0, 3.0}, {1.0, 2.0}, {2.0, 1.0}});
  CHECK(p.a == 0);
  CHECK(p.b == 3);
  // Exactly linear data is matched.
  p = kolm::fit_upper_line({{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}});
  CHECK(p.a == doctest::Approx(2));
  CHECK(p.b == doctest::Approx(1));
  CHECK_THROWS_AS(kolm::fit_upper_line({}), std::invalid_argument);
}

TEST_CASE("fit is feasible and as tight as a brute-force slope scan") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> gd(0, 12), vd(-5, 15);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<double, double>> pts;
    const int k = 1 + trial % 9;
    for (int i = 0; i < k; ++i) pts.emplace_back(gd(rng), vd(rng));
    const LinearPin p = kolm::fit_upper_line(pts);
    CHECK(p.a >= 0);
    for (const auto& [g, v] : pts) CHECK(p.holds(g, v));
    // Slack is measured over distinct g values, keeping the top point per g.
    std::map<double, double> top;
    for (const auto& [g, v] : pts) top[g] = top.count(g) ? std::max(top[g], v) : v;
    const std::vector<std::pair<double, double>> dedup(top.begin(), top.end());
    CHECK(total_slack(dedup, p.a, p.b) <= brute_force_min_slack(dedup) + 1e-6);
  }
}

TEST_CASE("structured and csv rendering") {
  kolm::Report r;
  r.name = "demo";
  r.add("n", 3);
  r.add("mode", "plain");
  r.columns = {"x", "w"};
  r.records = {{"010", "2"}, {"111", "-1"}};
  CHECK(kolm::render_structured(r) ==
        "[report demo]\nn = 3\nmode = plain\n[records 2]\nx=010 w=2\nx=111 w=-1\n[failures 0]\n[end demo pass]\n");
  CHECK(kolm::render_csv(r) == "x,w\n010,2\n111,-1\n");
  r.fail("boom");
  CHECK_FALSE(r.passed());
  CHECK(kolm::render_structured(r).find("[failures 1]\nboom\n[end demo fail]\n") != std::string::npos);
  CHECK(kolm::fmt_complexity(std::nullopt) == "ABOVE_BOUND");
  CHECK(kolm::fmt_double(0.5) == "0.500000");
}

TEST_CASE("pin store") {
  const auto path = scratch("pins") / "pins.json";
  kolm::PinStore empty = kolm::PinStore::load(path);
  CHECK_FALSE(empty.has(kolm::PinStore::kMainTheorem));
  CHECK_FALSE(empty.line(kolm::PinStore::kMainTheorem).has_value());

  kolm::PinStore s;
  s.set_line(kolm::PinStore::kMainTheorem, {0.5, 9}, {{"n", 3}});
  s.set_integer(kolm::PinStore::kWitnessGap, 6);
  CHECK_THROWS_AS(s.set_integer(kolm::PinStore::kWitnessGap, 7), kolm::Error);
  s.save(path);

  const auto back = kolm::PinStore::load(path);
  CHECK(back.line(kolm::PinStore::kMainTheorem)->a == 0.5);
  CHECK(back.line(kolm::PinStore::kMainTheorem)->b == 9);
  CHECK(back.integer(kolm::PinStore::kWitnessGap) == 6);
  CHECK(back.json()["pins"][kolm::PinStore::kMainTheorem]["context"]["n"] == 3);

  auto expect = [&](const std::string& text, kolm::Errc code) {
    std::ofstream(path) << text;
    try {
      kolm::PinStore::load(path);
      FAIL("expected an error");
    } catch (const kolm::Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect("{not json", kolm::Errc::kMalformedInput);
  expect(R"({"version": 2, "machine": ")" + kolm::machine_fingerprint_hex() + R"(", "pins": {}})",
         kolm::Errc::kMalformedInput);
  expect(R"({"version": 1, "machine": "0000000000000000", "pins": {}})", kolm::Errc::kFingerprintMismatch);
}
