#include "misim/scenario.hpp"

#include <cmath>
#include <random>

#include "misim/coil_models.hpp"

namespace misim {

namespace {
double deg(double d) { return d * constants::pi / 180.0; }
}  // namespace

std::vector<CoilPose> build_external_array(const ArrayConfig& cfg) {
  std::vector<CoilGeometry> coils;
  for (std::size_t ring = 0; ring < cfg.ring_counts.size(); ++ring) {
    const int n = cfg.ring_counts[ring];
    const double radius = cfg.ring_radii[ring];
    const double tilt = deg(cfg.ring_tilts_deg[ring]);
    for (int i = 0; i < n; ++i) {
      const double phi = 2.0 * constants::pi * i / n;
      const Vec3 radial(std::cos(phi), std::sin(phi), 0.0);
      Vec3 axis = Vec3::UnitZ();
      if (radius > 0.0) {
        // axis line passes inside the ring at the sensor depth
        axis = std::cos(tilt) * Vec3::UnitZ() + std::sin(tilt) * radial;
        if (i % 2 == 1) axis = rotation_about(radial, deg(cfg.alternate_cant_deg)) * axis;
      }
      coils.push_back(make_loop_coil(cfg.coil_circumference, cfg.wire_diameter, radius * radial, axis.normalized()));
    }
  }
  for (std::size_t a = 0; a < coils.size(); ++a)
    for (std::size_t b = a + 1; b < coils.size(); ++b)
      if (cylinders_collide(coils[a], coils[b], 0.0))
        throw DomainError("external array: coils " + std::to_string(a) + " and " + std::to_string(b) + " intersect");
  std::vector<CoilPose> out;
  out.reserve(coils.size());
  for (auto& c : coils) out.emplace_back(c);
  return out;
}

Vec3 sensor_anchor(const Config& cfg) { return Vec3(0.0, 0.0, -cfg.sensor.depth); }

CoilGeometry make_swarm_coil(const Config& cfg, double size, const Vec3& center, const Vec3& axis) {
  return make_sensor_coil(size, cfg.sensor.turns, cfg.sensor.spacing_factor, center, axis.normalized());
}

Swarm sample_swarm(int n_relays, int n_sensors, const Vec3& anchor, double coil_size, std::uint64_t seed,
                   const Config& cfg) {
  if (n_sensors < 1 || n_relays < 0) throw DomainError("sample_swarm: need n_sensors >= 1 and n_relays >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> offset(0.0, cfg.monte_carlo.sigma_in_sizes * coil_size);
  const double margin = cfg.monte_carlo.collision_margin;
  Swarm sw;
  std::vector<CoilGeometry> placed;
  placed.push_back(make_swarm_coil(cfg, coil_size, anchor, random_unit_vector(rng)));
  const int total = n_sensors + n_relays;
  while (static_cast<int>(placed.size()) < total) {
    if (++sw.attempts > cfg.monte_carlo.max_attempts)
      throw SamplingError("sample_swarm: no collision-free placement within " +
                          std::to_string(cfg.monte_carlo.max_attempts) + " attempts");
    const Vec3 c = anchor + Vec3(offset(rng), offset(rng), offset(rng));
    const CoilGeometry g = make_swarm_coil(cfg, coil_size, c, random_unit_vector(rng));
    bool clash = false;
    for (const auto& p : placed) {
      if (cylinders_collide(g, p, margin)) {
        clash = true;
        break;
      }
    }
    if (!clash) placed.push_back(g);
  }
  sw.sensors.assign(placed.begin(), placed.begin() + n_sensors);
  sw.relays.assign(placed.begin() + n_sensors, placed.end());
  return sw;
}

double relay_capacitance(const CoilGeometry& coil, double f_hz) {
  const Complex z = coil_circuit(coil, f_hz).port_impedance();
  if (!(z.imag() > 0.0)) throw DomainError("relay_capacitance: coil is not inductive at this frequency");
  return 1.0 / (angular(f_hz) * z.imag());
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over (master, index)
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace misim
