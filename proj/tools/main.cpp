// misim: run the canonical experiments and write CSV tables.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "misim/config.hpp"
#include "misim/csv.hpp"
#include "misim/experiments.hpp"
#include "misim/system.hpp"

namespace fs = std::filesystem;
using namespace misim;

namespace {

enum Exit { kOk = 0, kValidation = 1, kConfig = 2, kNumerical = 3 };

struct Common {
  std::string config_path;
  std::string out_dir = "results";
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool force = false;
  std::vector<std::string> sets;
  std::optional<int> realizations;
};

Config load(const Common& c) {
  Config cfg = load_config(c.config_path, c.sets);
  if (c.seed) cfg.seed = *c.seed;
  if (c.realizations) cfg.monte_carlo.n_realizations = *c.realizations;
  cfg.check();
  return cfg;
}

int jobs_of(const Common& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string out_path(const Common& c, const std::string& name) { return (fs::path(c.out_dir) / name).string(); }

// Fails before any work is done when an output would be clobbered.
void check_outputs(const Common& c, std::initializer_list<std::string> names) {
  if (c.force) return;
  for (const auto& n : names)
    if (fs::exists(out_path(c, n))) throw std::runtime_error(out_path(c, n) + " exists (use --force to overwrite)");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RunManifest manifest(const std::string& cmd, const Config& cfg, int jobs, double wall) {
  RunManifest m;
  m.command = cmd;
  m.config_hash = config_hash(cfg);
  m.seed = cfg.seed;
  m.version = version();
  m.wall_seconds = wall;
  m.jobs = jobs;
  return m;
}

void audit_summary(RunManifest& m, const ZAudit& a) {
  m.summary["za_max_symmetry_error"] = a.max_symmetry_error;
  m.summary["za_min_passivity_ratio"] = a.min_passivity_ratio;
  m.summary["za_matrices"] = static_cast<double>(a.matrices);
}

void print_context(const ArrayContext& ctx) {
  const TDesign& t = ctx.t_design();
  const auto x = T_network_reactances(t.network);
  std::printf("array: %zu coils, T network (%.4g, %.4g, %.4g) ohm, SNR objective %.3f dB (start %.3f dB)\n",
              ctx.size(), x[0], x[1], x[2], t.objective_db, t.initial_objective_db);
  std::printf("3 dB band %.6g - %.6g MHz, %zu uplink bins\n", ctx.band3_lo() / 1e6, ctx.band3_hi() / 1e6,
              ctx.rate_grid().size());
}

int cmd_spectrum(const Common& c) {
  const Config cfg = load(c);
  check_outputs(c, {"spectrum.csv", "spectrum_manifest.json"});
  const auto t0 = std::chrono::steady_clock::now();
  const int jobs = jobs_of(c);
  const ArrayContext ctx(cfg);
  print_context(ctx);
  const SpectrumResult r = run_spectrum(ctx, jobs);
  std::vector<std::vector<double>> rows;
  for (const auto& x : r.rows) rows.push_back({x.frequency, x.perfect_db, x.practical_sensor_db, x.practical_both_db});
  write_csv(out_path(c, "spectrum.csv"),
            {"f_hz", "gain_db_perfect_match", "gain_db_practical_sensor", "gain_db_practical_both"}, rows, c.force);
  RunManifest m = manifest("spectrum", cfg, jobs, seconds_since(t0));
  m.summary["peak_frequency_hz"] = r.peak_frequency;
  m.summary["peak_gain_db"] = r.peak_db;
  audit_summary(m, r.audit);
  write_manifest(out_path(c, "spectrum_manifest.json"), m, c.force);
  std::printf("peak gain %.3f dB at %.6g MHz\n", r.peak_db, r.peak_frequency / 1e6);
  return kOk;
}

int cmd_sweep(const Common& c) {
  const Config cfg = load(c);
  check_outputs(c, {"coil_sweep.csv", "coil_sweep_manifest.json"});
  const auto t0 = std::chrono::steady_clock::now();
  const int jobs = jobs_of(c);
  const ArrayContext ctx(cfg);
  print_context(ctx);
  const SweepResult r = run_coil_sweep(ctx, jobs);
  std::vector<std::vector<double>> rows;
  for (const auto& x : r.rows) rows.push_back({x.size * 1e6, x.pte_db_min, x.pte_db_max, x.rate_min, x.rate_max});
  write_csv(out_path(c, "coil_sweep.csv"), {"coil_size_um", "pte_db_min", "pte_db_max", "rate_bps_min", "rate_bps_max"},
            rows, c.force);
  RunManifest m = manifest("coil-sweep", cfg, jobs, seconds_since(t0));
  m.summary["threshold_found"] = r.threshold_found ? 1.0 : 0.0;
  if (r.threshold_found) m.summary["threshold_size_um"] = r.threshold_size * 1e6;
  m.summary["rate_bps_max_at_check_size"] = r.rate_at_check_max;
  m.summary["rate_bps_min_at_check_size"] = r.rate_at_check_min;
  audit_summary(m, r.audit);
  write_manifest(out_path(c, "coil_sweep_manifest.json"), m, c.force);
  if (r.threshold_found)
    std::printf("outage threshold (best orientation) %.1f um\n", r.threshold_size * 1e6);
  else
    std::printf("outage threshold not reached on the size grid\n");
  std::printf("rate at %.0f um: %.4g bit/s (best), %.4g bit/s (worst)\n", cfg.sweep.rate_check_size * 1e6,
              r.rate_at_check_max, r.rate_at_check_min);
  return kOk;
}

int cmd_cdf(const Common& c, bool coop) {
  const Config cfg = load(c);
  const std::string stem = coop ? "coop_cdf" : "relay_cdf";
  check_outputs(c, {stem + ".csv", stem + "_runs.csv", stem + "_manifest.json"});
  const auto t0 = std::chrono::steady_clock::now();
  const int jobs = jobs_of(c);
  const ArrayContext ctx(cfg);
  print_context(ctx);
  const CdfResult r = run_cdf(ctx, coop, cfg.monte_carlo.n_realizations, jobs);

  std::vector<std::vector<double>> rows;
  for (const auto& x : cdf_table(r)) rows.push_back({x.rate, x.ecdf_simple, x.ecdf_elaborate});
  write_csv(out_path(c, stem + ".csv"), {"rate_bps", "ecdf_simple", "ecdf_elaborate"}, rows, c.force);
  std::vector<std::vector<double>> runs;
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const auto& x = r.runs[i];
    if (!x.ok) continue;
    runs.push_back({static_cast<double>(i), x.simple.rate, x.elaborate.rate, x.reference.rate,
                    static_cast<double>(x.elaborate.active_sensors)});
  }
  write_csv(out_path(c, stem + "_runs.csv"),
            {"realization", "rate_bps_simple", "rate_bps_elaborate", "rate_bps_no_relay", "active_sensors_elaborate"},
            runs, c.force);

  RunManifest m = manifest(coop ? "coop-cdf" : "relay-cdf", cfg, jobs, seconds_since(t0));
  m.summary["realizations"] = static_cast<double>(r.runs.size());
  m.summary["failed_realizations"] = r.failures;
  m.summary["median_rate_bps_simple"] = r.median_simple;
  m.summary["median_rate_bps_elaborate"] = r.median_elaborate;
  m.summary["median_rate_bps_no_relay"] = r.median_reference;
  m.summary["relays_detrimental_fraction"] = r.detrimental_fraction;
  m.summary["relays_helped_fraction"] = 1.0 - r.detrimental_fraction;
  m.summary["elaborate_beats_simple_fraction"] = r.elaborate_beats_simple;
  audit_summary(m, r.audit);
  for (std::size_t i = 0; i < r.runs.size(); ++i)
    if (!r.runs[i].ok) m.warnings.push_back("realization " + std::to_string(i) + ": " + r.runs[i].error);
  write_manifest(out_path(c, stem + "_manifest.json"), m, c.force);

  std::printf("%d realizations, %d failed\n", static_cast<int>(r.runs.size()), r.failures);
  std::printf("median rate: simple %.4g, elaborate %.4g, no relays %.4g bit/s\n", r.median_simple, r.median_elaborate,
              r.median_reference);
  std::printf("relays helped in %.1f %%, detrimental in %.1f %%; elaborate beats simple in %.1f %%\n",
              100.0 * (1.0 - r.detrimental_fraction), 100.0 * r.detrimental_fraction, 100.0 * r.elaborate_beats_simple);
  return kOk;
}

int cmd_validate(const Common& c) {
  const Config cfg = load(c);
  bool all = true;
  for (const auto& r : run_validation(cfg)) {
    std::printf("%s %-32s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    all = all && r.pass;
  }
  return all ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magneto-inductive in-body link simulator"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", c.config_path, "JSON config (defaults when omitted)");
    sub->add_option("--out", c.out_dir, "output directory");
    sub->add_option("--seed", c.seed, "master seed");
    sub->add_option("--jobs", c.jobs, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--force", c.force, "overwrite existing outputs");
    sub->add_option("--set", c.sets, "override key=value (dotted JSON path)");
  };
  auto* spectrum = app.add_subcommand("spectrum", "downlink channel gain over frequency");
  auto* sweep = app.add_subcommand("coil-sweep", "PTE and rate versus sensor coil size");
  auto* relay = app.add_subcommand("relay-cdf", "rate CDF, one sensor with passive relays");
  auto* coop = app.add_subcommand("coop-cdf", "rate CDF, cooperative sensors with relays");
  auto* validate = app.add_subcommand("validate", "fast invariant checks");
  for (auto* s : {spectrum, sweep, relay, coop, validate}) add_common(s);
  for (auto* s : {relay, coop}) s->add_option("--realizations", c.realizations, "Monte Carlo realizations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*spectrum) return cmd_spectrum(c);
    if (*sweep) return cmd_sweep(c);
    if (*relay) return cmd_cdf(c, false);
    if (*coop) return cmd_cdf(c, true);
    if (*validate) return cmd_validate(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const SynthesisError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
  return kOk;
}
