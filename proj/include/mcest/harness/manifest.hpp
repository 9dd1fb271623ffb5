#ifndef MCEST_HARNESS_MANIFEST_HPP
#define MCEST_HARNESS_MANIFEST_HPP

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "mcest/errors.hpp"

#ifndef MCEST_VERSION
#define MCEST_VERSION "unknown"
#endif

namespace mcest::harness {

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

struct OutputRecord {
  std::string path;  ///< relative to the output directory
  std::string sha256;
  std::size_t bytes = 0;
};

/// Provenance of one run. `config` is the fully resolved configuration:
/// feeding the manifest back as --config reproduces the outputs exactly.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string version = MCEST_VERSION;
  double wall_time_s = 0.0;
  unsigned threads = 1;
  std::vector<OutputRecord> outputs;
  nlohmann::json inputs = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  int exit_code = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["manifest"] = 1;
    j["command"] = command;
    j["version"] = version;
    j["seed"] = seed;
    j["threads"] = threads;
    j["wall_time_s"] = wall_time_s;
    j["config"] = config;
    j["outputs"] = nlohmann::json::array();
    for (const auto& o : outputs)
      j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    j["inputs"] = inputs;
    j["summary"] = summary;
    j["exit_code"] = exit_code;
    return j;
  }
};

/// True for a JSON document that is a run manifest rather than a plain config.
inline bool is_manifest(const nlohmann::json& j) { return j.is_object() && j.contains("manifest"); }

}  // namespace mcest::harness

#endif  // MCEST_HARNESS_MANIFEST_HPP
