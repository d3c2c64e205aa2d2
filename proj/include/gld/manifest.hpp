#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gld {

inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility sidecar written before a command produces outputs: the
// resolved configuration, seed, and content digests of every input file.
// Deliberately no timestamps, so reruns produce identical bytes.
struct RunManifest {
  std::string command;
  uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;  // key, value
  std::vector<std::pair<std::string, std::string>> inputs;  // path, fnv1a64 hex

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, int64_t value);
  void add_input(const std::string& path);  // reads and digests the file

  std::string to_json() const;
  void write(const std::string& path) const;
};

}  // namespace gld
