#include "gld/manifest.hpp"

#include <json.hpp>

#include "gld/io.hpp"

namespace gld {

void RunManifest::set(const std::string& key, const std::string& value) {
  config.emplace_back(key, value);
}

void RunManifest::set(const std::string& key, double value) {
  config.emplace_back(key, format_double(value));
}

void RunManifest::set(const std::string& key, int64_t value) {
  config.emplace_back(key, std::to_string(value));
}

void RunManifest::add_input(const std::string& path) {
  inputs.emplace_back(path, fnv1a64_hex(read_file(path)));
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  j["seed"] = seed;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json ins = nlohmann::ordered_json::object();
  for (const auto& [path, digest] : inputs) ins[path] = digest;
  j["inputs"] = ins;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  write_file_atomic(path, to_json());
}

}  // namespace gld
