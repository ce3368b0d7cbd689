#include "misim/csv.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace misim {

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_output(const std::string& path, bool force) {
  namespace fs = std::filesystem;
  if (fs::exists(path) && !force) throw std::runtime_error(path + " exists (use --force to overwrite)");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, bool force) {
  std::ofstream os = open_output(path, force);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::logic_error("write_csv: row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const std::string& path, const RunManifest& m, bool force) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["wall_seconds"] = m.wall_seconds;
  j["jobs"] = m.jobs;
  j["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.summary) j["summary"][k] = v;
  j["warnings"] = m.warnings;
  std::ofstream os = open_output(path, force);
  os << j.dump(2) << '\n';
}

const char* version() { return "1.0.0"; }

}  // namespace misim
