#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cpl/spectral.hpp"

namespace cpl {

/// Snapshot file layout, little-endian:
///   "CPL1" | u32 n | f64 t | f64 tau | n x f64 values
struct Snapshot {
  double t = 0.0;
  double tau = 0.0;  // hull offset of the forcing at time t
  std::vector<double> values;
};

void write_snapshot(const std::filesystem::path& path, const Field& u, double t, double tau);
/// Throws Error on a bad magic, short file or trailing bytes.
Snapshot read_snapshot(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

struct Artifact {
  std::string path;  // relative to the run directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string scenario;
  std::string config_hash;  // sha256 of the canonical config, output dir excluded
  std::string tool_version;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  bool ok = true;
  int exit_code = 0;  // 0 ok, 2 validation, 3 runtime, 4 diagnostic invariant
  std::string error_kind;
  std::string error;
  double error_time = -1.0;  // for timed errors
  std::vector<Artifact> artifacts;

  const Artifact* find(const std::string& path) const;
};

std::string to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

/// Recomputes every checksum against files under `dir`. Returns the paths
/// that are missing or differ; empty means the manifest verifies.
std::vector<std::string> verify_manifest(const RunManifest& m, const std::filesystem::path& dir);

std::string utc_now();

}  // namespace cpl
