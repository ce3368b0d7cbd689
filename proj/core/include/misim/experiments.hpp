#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "misim/link.hpp"
#include "misim/system.hpp"

namespace misim {

/// Runs body(i) for i in [0, n) on `jobs` threads. Each index runs exactly
/// once; results must be written by index so output order never depends on
/// scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

// ------------------------------------------------------------ spectrum

struct SpectrumRow {
  double frequency = 0.0;
  double perfect_db = 0.0;           // ideal matching at both ends
  double practical_sensor_db = 0.0;  // L network at the sensor, ideal array
  double practical_both_db = 0.0;    // uplink through the array T networks (reciprocal)
};

struct SpectrumResult {
  std::vector<SpectrumRow> rows;
  double peak_frequency = 0.0;  // of the practical-both curve
  double peak_db = 0.0;
  ZAudit audit;
};

/// Downlink channel gain ||h||^2 of the reference sensor (axis along the
/// array normal) over the spectrum grid.
SpectrumResult run_spectrum(const ArrayContext& ctx, int jobs);

// ------------------------------------------------------------ coil sweep

struct SweepRow {
  double size = 0.0;
  double pte_db_min = 0.0;
  double pte_db_max = 0.0;
  double rate_min = 0.0;
  double rate_max = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool threshold_found = false;
  double threshold_size = 0.0;  // where the best orientation reaches P_0
  double rate_at_check_max = 0.0;
  double rate_at_check_min = 0.0;
  int orientations = 0;
  ZAudit audit;
};

/// Fibonacci directions plus the three axes.
std::vector<Vec3> sweep_orientations(int n_fibonacci);

/// Single sensor below the array, no relays: PTE at the design frequency and
/// waterfilled uplink rate over all orientations and sizes.
SweepResult run_coil_sweep(const ArrayContext& ctx, int jobs);

// ------------------------------------------------------------ link schemes

struct SchemeOutcome {
  double rate = 0.0;  // bit/s
  double received_power = 0.0;  // sensor of interest, W
  double downlink_frequency = 0.0;
  bool outage = false;
  int active_sensors = 0;
  std::vector<std::string> warnings;
};

/// SIMPLE: nominal matching, downlink at f_design, flat power over the 3 dB
/// band. ELABORATE: re-matched sensor, best downlink bin, waterfilling.
SchemeOutcome evaluate_single(const LinkSystem& sys, Scheme scheme);

/// Cooperative variant: constrained downlink beamforming, per-node budgets
/// and per-bin log-det uplink (heuristic spectral split for ELABORATE).
SchemeOutcome evaluate_coop(const LinkSystem& sys, Scheme scheme);

// ------------------------------------------------------------ Monte Carlo

struct Realization {
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  SchemeOutcome simple;
  SchemeOutcome elaborate;
  SchemeOutcome reference;  // same sensors without relays, ELABORATE
};

struct CdfResult {
  bool cooperative = false;
  std::vector<Realization> runs;
  int failures = 0;
  double median_simple = 0.0;
  double median_elaborate = 0.0;
  double median_reference = 0.0;
  double detrimental_fraction = 0.0;    // elaborate < reference
  double elaborate_beats_simple = 0.0;  // elaborate > simple
  ZAudit audit;
};

/// Swarm Monte Carlo with `n` realizations (child seeds of cfg.seed).
CdfResult run_cdf(const ArrayContext& ctx, bool cooperative, int n, int jobs);

/// Empirical CDF table: sorted distinct rates with the fraction of each
/// scheme's realizations at or below them.
struct CdfRow {
  double rate = 0.0;
  double ecdf_simple = 0.0;
  double ecdf_elaborate = 0.0;
};
std::vector<CdfRow> cdf_table(const CdfResult& r);

double median(std::vector<double> v);

// ------------------------------------------------------------ validation

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Fast invariant suite (no T-network search).
std::vector<CheckResult> run_validation(const Config& cfg);

}  // namespace misim
