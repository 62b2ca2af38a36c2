#include "nsplab/report.hpp"

#include "nsplab/grid_io.hpp"

#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace nsplab {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add_numeric_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_g17(v));
  rows.push_back(std::move(row));
}

namespace {

// RFC-4180 quoting; our numeric cells never need it, names might.
std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += csv_cell(table.header[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::invalid_argument("render_csv: row width does not match header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  atomic_write_text(path, render_csv(table));
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  atomic_write_text(path, j.dump(2) + "\n");
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["run_id"] = run_id;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["ok"] = ok;
  if (!error.empty()) j["error"] = error;
  j["wall_seconds"] = wall_seconds;
  j["artifacts"] = artifacts;
  j["config"] = config_echo;
  return j;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  write_json(path, m.to_json());
}

}  // namespace nsplab
