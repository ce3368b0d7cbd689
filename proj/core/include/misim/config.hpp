#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "misim/channel.hpp"
#include "misim/coop.hpp"
#include "misim/coupling.hpp"
#include "misim/matching.hpp"

namespace misim {

// All lengths in meters, frequencies in Hz, powers in watts. Key names in the
// JSON file carry the unit as a suffix.

struct ArrayConfig {
  double coil_circumference = 0.10;
  double wire_diameter = 3e-3;
  std::vector<int> ring_counts{1, 8, 12};
  std::vector<double> ring_radii{0.0, 0.12, 0.20};
  std::vector<double> ring_tilts_deg{0.0, 20.0, 35.0};
  double alternate_cant_deg = 30.0;
};

struct SensorConfig {
  double size = 350e-6;
  int turns = 5;
  double spacing_factor = 1.5;
  double depth = 0.12;
};

struct SpectrumConfig {
  double f_lo = 500e6;
  double f_hi = 1000e6;
  int n_bins = 501;
};

struct UplinkConfig {
  double bin_width = 100e3;
  /// grid spans f_design +- band_halfwidth_3db * (3 dB bandwidth)
  double band_halfwidth_3db = 1.5;
};

struct SweepConfig {
  double size_min = 100e-6;
  double size_max = 500e-6;
  int n_sizes = 25;
  int n_orientations = 26;  // plus the three axes
  double rate_check_size = 275e-6;
};

struct SwarmConfig {
  int n_sensors = 1;
  int n_relays = 19;
};

struct MonteCarloConfig {
  int n_realizations = 500;
  double sigma_in_sizes = 1.5;
  double collision_margin = 0.1;
  int max_attempts = 10000;
  SwarmConfig relay{1, 19};
  SwarmConfig coop{5, 15};
};

struct MatchingConfig {
  AlternatingMatchOptions alternating{};
  int spectrum_alternating_iters = 60;
  ReactanceSearchOptions t_search{};
};

struct ValidateConfig {
  int random_systems = 100;
  double power_tol = 1e-9;
  double symmetry_tol = 1e-9;
  double passivity_tol = 1e-12;
  double match_tol = 1e-8;
  double kkt_tol = 1e-9;
};

struct Config {
  std::uint64_t seed = 1;
  double design_frequency = 750e6;
  double tx_power = 1.0;
  double activation_power = 50e-9;
  double reference_ohms = 50.0;
  ArrayConfig array{};
  SensorConfig sensor{};
  NoiseEnvironment noise{};
  CouplingOptions coupling{};
  SpectrumConfig spectrum{};
  UplinkConfig uplink{};
  SweepConfig sweep{};
  MonteCarloConfig monte_carlo{};
  MatchingConfig matching{};
  LogDetOptions logdet{};
  ValidateConfig validate{};

  /// Throws ConfigError naming the offending field.
  void check() const;
};

/// Full config as indented JSON text (documents every key).
std::string config_to_json(const Config& c);

/// Parses a full or partial JSON config (missing keys keep defaults), then
/// applies "a.b.c=value" overrides whose value is read as JSON when possible
/// and as a string otherwise. Unknown keys and wrongly typed values throw
/// ConfigError with the JSON path.
Config config_from_json(const std::string& text, const std::vector<std::string>& overrides = {});

/// Loads a file (empty path = defaults) and applies overrides.
Config load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// FNV-1a over the canonical dump, as 16 hex digits.
std::string config_hash(const Config& c);

}  // namespace misim
