#include "kolm/pins.h"

#include <fstream>

#include "kolm/error.h"
#include "kolm/machine.h"

namespace kolm {

PinStore::PinStore()
    : doc_({{"version", kVersion}, {"machine", machine_fingerprint_hex()}, {"pins", nlohmann::json::object()}}) {}

PinStore PinStore::load(const std::filesystem::path& path) {
  PinStore store;
  std::ifstream in(path);
  if (!in) return store;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedInput, "pin file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || doc.value("version", 0) != kVersion || !doc.contains("pins") ||
      !doc["pins"].is_object()) {
    throw Error(Errc::kMalformedInput, "pin file " + path.string() + ": unsupported layout");
  }
  if (doc.value("machine", "") != machine_fingerprint_hex()) {
    throw Error(Errc::kFingerprintMismatch, "pin file " + path.string() + " was made for another machine");
  }
  store.doc_ = std::move(doc);
  return store;
}

void PinStore::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << doc_.dump(2) << '\n';
    if (!out) throw Error(Errc::kInvalidArgument, "cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

bool PinStore::has(const std::string& key) const { return doc_["pins"].contains(key); }

std::optional<LinearPin> PinStore::line(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  const auto& p = doc_["pins"][key];
  try {
    return LinearPin{p.at("a").get<double>(), p.at("b").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedInput, "pin " + key + ": " + e.what());
  }
}

std::optional<int> PinStore::integer(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  try {
    return doc_["pins"][key].at("value").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kMalformedInput, "pin " + key + ": " + e.what());
  }
}

void PinStore::claim(const std::string& key) const {
  if (has(key)) throw Error(Errc::kInvalidArgument, "pin " + key + " already exists; refusing to re-pin");
}

void PinStore::set_line(const std::string& key, const LinearPin& pin, nlohmann::json context) {
  claim(key);
  nlohmann::json entry = {{"a", pin.a}, {"b", pin.b}};
  if (!context.is_null()) entry["context"] = std::move(context);
  doc_["pins"][key] = std::move(entry);
}

void PinStore::set_integer(const std::string& key, int value, nlohmann::json context) {
  claim(key);
  nlohmann::json entry = {{"value", value}};
  if (!context.is_null()) entry["context"] = std::move(context);
  doc_["pins"][key] = std::move(entry);
}

}  // namespace kolm
