#include "misim/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace misim {

using nlohmann::json;

namespace {

// One field list drives reading, writing and the unknown-key check.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <class T>
  void operator()(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    read(*it, out, path_ + "." + key);
  }

  template <class F>
  void section(const char* key, F&& fn) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    Reader sub(*it, path_ + "." + key);
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where() + ": unknown key '" + it.key() + "'");
  }

 private:
  std::string where() const { return path_.empty() ? std::string("config") : "config" + path_; }

  static void read(const json& v, double& out, const std::string& p) {
    if (!v.is_number()) throw ConfigError("config" + p + ": expected a number");
    out = v.get<double>();
  }
  static void read(const json& v, int& out, const std::string& p) {
    if (!v.is_number_integer()) throw ConfigError("config" + p + ": expected an integer");
    out = v.get<int>();
  }
  static void read(const json& v, std::uint64_t& out, const std::string& p) {
    if (!v.is_number_unsigned()) throw ConfigError("config" + p + ": expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  static void read(const json& v, std::string& out, const std::string& p) {
    if (!v.is_string()) throw ConfigError("config" + p + ": expected a string");
    out = v.get<std::string>();
  }
  template <class T>
  static void read(const json& v, std::vector<T>& out, const std::string& p) {
    if (!v.is_array()) throw ConfigError("config" + p + ": expected an array");
    out.assign(v.size(), T{});
    for (std::size_t i = 0; i < v.size(); ++i) read(v[i], out[i], p + "[" + std::to_string(i) + "]");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

class Writer {
 public:
  explicit Writer(json& j) : j_(j) { j_ = json::object(); }

  template <class T>
  void operator()(const char* key, T& v) {
    j_[key] = v;
  }

  template <class F>
  void section(const char* key, F&& fn) {
    json sub;
    Writer w(sub);
    fn(w);
    j_[key] = std::move(sub);
  }

 private:
  json& j_;
};

// Enum and complex fields travel as plain strings / number pairs.
struct Shadow {
  std::string correlation_model;
  double rho_re = 0.0;
  double rho_im = 0.0;
};

template <class V>
void visit_swarm(V& v, SwarmConfig& s) {
  v("n_sensors", s.n_sensors);
  v("n_relays", s.n_relays);
}

template <class V>
void visit(V& v, Config& c, Shadow& sh) {
  v("seed", c.seed);
  v("design_frequency_hz", c.design_frequency);
  v("tx_power_w", c.tx_power);
  v("activation_power_w", c.activation_power);
  v("reference_ohm", c.reference_ohms);
  v.section("array", [&](V& a) {
    a("coil_circumference_m", c.array.coil_circumference);
    a("wire_diameter_m", c.array.wire_diameter);
    a("ring_counts", c.array.ring_counts);
    a("ring_radii_m", c.array.ring_radii);
    a("ring_tilts_deg", c.array.ring_tilts_deg);
    a("alternate_cant_deg", c.array.alternate_cant_deg);
  });
  v.section("sensor", [&](V& a) {
    a("size_m", c.sensor.size);
    a("turns", c.sensor.turns);
    a("spacing_factor", c.sensor.spacing_factor);
    a("depth_m", c.sensor.depth);
  });
  v.section("noise", [&](V& a) {
    a("antenna_temperature_k", c.noise.antenna_temperature);
    a("physical_temperature_k", c.noise.physical_temperature);
    a("correlation_model", sh.correlation_model);
    a("lna_beta_a2_per_hz", c.noise.lna.beta);
    a("lna_noise_resistance_ohm", c.noise.lna.noise_resistance);
    a("lna_correlation_re", sh.rho_re);
    a("lna_correlation_im", sh.rho_im);
    a("iid_variance_v2", c.noise.lna.iid_variance);
  });
  v.section("coupling", [&](V& a) {
    a("use_dipole_beyond_diameters", c.coupling.use_dipole_beyond);
    a("quadrature_initial_points_per_turn", c.coupling.quadrature.initial_points_per_turn);
    a("quadrature_max_points_per_turn", c.coupling.quadrature.max_points_per_turn);
    a("quadrature_rel_tol", c.coupling.quadrature.rel_tol);
  });
  v.section("spectrum", [&](V& a) {
    a("f_lo_hz", c.spectrum.f_lo);
    a("f_hi_hz", c.spectrum.f_hi);
    a("n_bins", c.spectrum.n_bins);
  });
  v.section("uplink", [&](V& a) {
    a("bin_width_hz", c.uplink.bin_width);
    a("band_halfwidth_3db", c.uplink.band_halfwidth_3db);
  });
  v.section("coil_sweep", [&](V& a) {
    a("size_min_m", c.sweep.size_min);
    a("size_max_m", c.sweep.size_max);
    a("n_sizes", c.sweep.n_sizes);
    a("n_orientations", c.sweep.n_orientations);
    a("rate_check_size_m", c.sweep.rate_check_size);
  });
  v.section("monte_carlo", [&](V& a) {
    a("n_realizations", c.monte_carlo.n_realizations);
    a("sigma_in_sizes", c.monte_carlo.sigma_in_sizes);
    a("collision_margin", c.monte_carlo.collision_margin);
    a("max_attempts", c.monte_carlo.max_attempts);
    a.section("relay_cdf", [&](V& b) { visit_swarm(b, c.monte_carlo.relay); });
    a.section("coop_cdf", [&](V& b) { visit_swarm(b, c.monte_carlo.coop); });
  });
  v.section("matching", [&](V& a) {
    a("alternating_max_iters", c.matching.alternating.max_iters);
    a("alternating_tol", c.matching.alternating.tol);
    a("spectrum_alternating_iters", c.matching.spectrum_alternating_iters);
    a("t_network_starts", c.matching.t_search.starts);
    a("t_network_evaluations_per_start", c.matching.t_search.max_evaluations_per_start);
  });
  v.section("logdet", [&](V& a) {
    a("max_dual_iters", c.logdet.max_dual_iters);
    a("max_primal_iters", c.logdet.max_primal_iters);
    a("gap_tol", c.logdet.gap_tol);
  });
  v.section("validate", [&](V& a) {
    a("random_systems", c.validate.random_systems);
    a("power_tol", c.validate.power_tol);
    a("symmetry_tol", c.validate.symmetry_tol);
    a("passivity_tol", c.validate.passivity_tol);
    a("match_tol", c.validate.match_tol);
    a("kkt_tol", c.validate.kkt_tol);
  });
}

Shadow shadow_of(const Config& c) {
  Shadow sh;
  sh.correlation_model = c.noise.correlation == CorrelationModel::Bessel ? "bessel" : "identity";
  sh.rho_re = c.noise.lna.correlation.real();
  sh.rho_im = c.noise.lna.correlation.imag();
  return sh;
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + ov + "': expected key=value");
    const std::string key = ov.substr(0, eq);
    const std::string text = ov.substr(eq + 1);
    json* node = &j;
    std::stringstream ks(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ks, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      if (!node->is_object()) throw ConfigError("override '" + key + "': '" + parts[i] + "' is not a section");
      node = &(*node)[parts[i]];
      if (node->is_null()) *node = json::object();
    }
    if (!node->is_object()) throw ConfigError("override '" + key + "': parent is not a section");
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    (*node)[parts.back()] = std::move(value);
  }
}

}  // namespace

void Config::check() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  need(design_frequency > 0.0, "design_frequency_hz must be > 0");
  need(tx_power > 0.0, "tx_power_w must be > 0");
  need(activation_power >= 0.0, "activation_power_w must be >= 0");
  need(reference_ohms > 0.0, "reference_ohm must be > 0");
  need(array.coil_circumference > 0.0, "array.coil_circumference_m must be > 0");
  need(array.wire_diameter > 0.0, "array.wire_diameter_m must be > 0");
  need(array.coil_circumference > constants::pi * array.wire_diameter,
       "array.coil_circumference_m too small for the wire");
  need(!array.ring_counts.empty(), "array.ring_counts must not be empty");
  need(array.ring_counts.size() == array.ring_radii.size() && array.ring_counts.size() == array.ring_tilts_deg.size(),
       "array.ring_counts, ring_radii_m and ring_tilts_deg must have equal length");
  for (std::size_t i = 0; i < array.ring_counts.size(); ++i) {
    need(array.ring_counts[i] >= 1, "array.ring_counts entries must be >= 1");
    need(array.ring_radii[i] >= 0.0, "array.ring_radii_m entries must be >= 0");
    need(array.ring_radii[i] > 0.0 || array.ring_counts[i] == 1, "a ring of radius 0 holds exactly one coil");
  }
  need(sensor.size > 0.0, "sensor.size_m must be > 0");
  need(sensor.turns >= 1, "sensor.turns must be >= 1");
  need(sensor.spacing_factor >= 1.0, "sensor.spacing_factor must be >= 1");
  need(sensor.depth > 0.0, "sensor.depth_m must be > 0");
  need(noise.antenna_temperature >= 0.0 && noise.physical_temperature >= 0.0, "noise temperatures must be >= 0");
  need(noise.lna.beta >= 0.0, "noise.lna_beta_a2_per_hz must be >= 0");
  need(noise.lna.noise_resistance > 0.0, "noise.lna_noise_resistance_ohm must be > 0");
  need(std::abs(noise.lna.correlation) <= 1.0, "noise.lna_correlation magnitude must be <= 1");
  need(noise.lna.iid_variance >= 0.0, "noise.iid_variance_v2 must be >= 0");
  need(coupling.use_dipole_beyond > 0.0, "coupling.use_dipole_beyond_diameters must be > 0");
  need(coupling.quadrature.initial_points_per_turn >= 4, "coupling.quadrature_initial_points_per_turn must be >= 4");
  need(coupling.quadrature.max_points_per_turn >= coupling.quadrature.initial_points_per_turn,
       "coupling.quadrature_max_points_per_turn below the initial count");
  need(coupling.quadrature.rel_tol > 0.0, "coupling.quadrature_rel_tol must be > 0");
  need(spectrum.f_lo > 0.0 && spectrum.f_hi > spectrum.f_lo, "spectrum needs 0 < f_lo_hz < f_hi_hz");
  need(spectrum.n_bins >= 1, "spectrum.n_bins must be >= 1");
  need(uplink.bin_width > 0.0, "uplink.bin_width_hz must be > 0");
  need(uplink.band_halfwidth_3db > 0.0, "uplink.band_halfwidth_3db must be > 0");
  need(sweep.size_min > 0.0 && sweep.size_max >= sweep.size_min, "coil_sweep sizes must satisfy 0 < min <= max");
  need(sweep.n_sizes >= 1, "coil_sweep.n_sizes must be >= 1");
  need(sweep.n_orientations >= 0, "coil_sweep.n_orientations must be >= 0");
  need(monte_carlo.n_realizations >= 1, "monte_carlo.n_realizations must be >= 1");
  need(monte_carlo.sigma_in_sizes >= 0.0, "monte_carlo.sigma_in_sizes must be >= 0");
  need(monte_carlo.collision_margin >= 0.0, "monte_carlo.collision_margin must be >= 0");
  need(monte_carlo.max_attempts >= 1, "monte_carlo.max_attempts must be >= 1");
  for (const auto* s : {&monte_carlo.relay, &monte_carlo.coop}) {
    need(s->n_sensors >= 1, "monte_carlo swarm needs n_sensors >= 1");
    need(s->n_relays >= 0, "monte_carlo swarm needs n_relays >= 0");
  }
  need(matching.alternating.max_iters >= 1 && matching.spectrum_alternating_iters >= 1,
       "matching iteration counts must be >= 1");
  need(matching.alternating.tol > 0.0, "matching.alternating_tol must be > 0");
  need(matching.t_search.starts >= 1, "matching.t_network_starts must be >= 1");
  need(matching.t_search.max_evaluations_per_start >= 10, "matching.t_network_evaluations_per_start must be >= 10");
  need(logdet.max_dual_iters >= 1 && logdet.max_primal_iters >= 0, "logdet iteration counts out of range");
  need(logdet.gap_tol > 0.0, "logdet.gap_tol must be > 0");
  need(validate.random_systems >= 1, "validate.random_systems must be >= 1");
  need(validate.power_tol > 0.0 && validate.symmetry_tol > 0.0 && validate.passivity_tol > 0.0 &&
           validate.match_tol > 0.0 && validate.kkt_tol > 0.0,
       "validate tolerances must be > 0");
}

std::string config_to_json(const Config& c) {
  json j;
  Config copy = c;
  Shadow sh = shadow_of(c);
  Writer w(j);
  visit(w, copy, sh);
  return j.dump(2);
}

Config config_from_json(const std::string& text, const std::vector<std::string>& overrides) {
  json j;
  try {
    j = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  apply_overrides(j, overrides);
  Config c;
  Shadow sh = shadow_of(c);
  Reader r(j, "");
  visit(r, c, sh);
  r.finish();
  if (sh.correlation_model == "bessel") {
    c.noise.correlation = CorrelationModel::Bessel;
  } else if (sh.correlation_model == "identity") {
    c.noise.correlation = CorrelationModel::Identity;
  } else {
    throw ConfigError("config.noise.correlation_model: expected \"bessel\" or \"identity\"");
  }
  c.noise.lna.correlation = Complex(sh.rho_re, sh.rho_im);
  c.check();
  return c;
}

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return config_from_json(text, overrides);
}

std::string config_hash(const Config& c) {
  const std::string s = config_to_json(c);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace misim
