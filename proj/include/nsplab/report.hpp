#pragma once

// CSV/JSON emission and the per-run manifest.
//
// Numbers in CSV use %.17g so every double round-trips exactly; files end
// with LF line endings and are written atomically.  JSON reports keep
// insertion order (stable across runs); the manifest additionally carries
// the run id and wall-clock time, the only fields that vary between
// reruns of an identical config.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nsplab {

inline constexpr const char* kToolVersion = "nsplab 0.1.0";

std::string format_g17(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_numeric_row(const std::vector<double>& values);
};

std::string render_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

std::string hash_hex(std::uint64_t h);
std::string timestamp_utc();

struct RunManifest {
  std::string run_id;                   // timestamp + short config hash
  std::string kind;
  std::string config_hash;
  nlohmann::ordered_json config_echo;
  std::vector<std::string> artifacts;   // file names relative to the out dir
  std::string version = kToolVersion;
  double wall_seconds = 0.0;
  bool ok = false;
  std::string error;                    // empty on success

  nlohmann::ordered_json to_json() const;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace nsplab
