#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace misim {

/// Shortest round-trip-stable text with 9 significant digits, '.' decimal
/// point regardless of the global locale.
std::string format_number(double v);

/// Writes a header line and numeric rows. Refuses to replace an existing file
/// unless `force` (throws std::runtime_error).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, bool force);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  double wall_seconds = 0.0;
  int jobs = 1;
  std::map<std::string, double> summary;
  std::vector<std::string> warnings;
};

/// JSON manifest next to the results (same overwrite rule as write_csv).
void write_manifest(const std::string& path, const RunManifest& m, bool force);

/// Library version string.
const char* version();

}  // namespace misim
