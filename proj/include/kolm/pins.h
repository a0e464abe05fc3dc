#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "kolm/report.h"

namespace kolm {

// Versioned store of pinned constants, one JSON object per key:
//   {"version": 1, "machine": "<fingerprint>", "pins": {"<key>": {...}}}
// A key is written once; later runs compare against it.
class PinStore {
 public:
  static constexpr int kVersion = 1;

  // Well-known keys.
  static constexpr const char* kMainTheorem = "main_theorem";
  static constexpr const char* kChainRule = "chain_rule_B";
  static constexpr const char* kTheorem2 = "theorem2";
  static constexpr const char* kTheorem3 = "theorem3";
  static constexpr const char* kWitnessGap = "witness_gap0";

  PinStore();

  // A missing file is an empty store. Error(kMalformedInput) for bad JSON or
  // an unknown version, Error(kFingerprintMismatch) for another machine.
  static PinStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const;
  std::optional<LinearPin> line(const std::string& key) const;
  std::optional<int> integer(const std::string& key) const;

  // Error(kInvalidArgument) if the key is already pinned. `context` records
  // where the value came from (sizes, bounds).
  void set_line(const std::string& key, const LinearPin& pin, nlohmann::json context = {});
  void set_integer(const std::string& key, int value, nlohmann::json context = {});

  const nlohmann::json& json() const { return doc_; }

 private:
  void claim(const std::string& key) const;

  nlohmann::json doc_;
};

}  // namespace kolm
