#pragma once

#include <cstdint>
#include <vector>

#include "misim/config.hpp"
#include "misim/geometry.hpp"

namespace misim {

/// Coils of one deployment. Relays are terminated by series capacitors.
struct Deployment {
  std::vector<CoilPose> external;
  std::vector<CoilPose> sensors;  // sensors[0] is the sensor of interest
  std::vector<CoilPose> relays;
  std::vector<double> relay_capacitance;  // farads
};

/// External array: rings of loops in the plane z = 0. Ring coils tilt toward
/// the center axis; every other coil on a ring is additionally canted
/// sideways. Throws DomainError when two coils intersect.
std::vector<CoilPose> build_external_array(const ArrayConfig& cfg);

/// Position of the sensor of interest (below the array center).
Vec3 sensor_anchor(const Config& cfg);

/// Sensor-type coil (size, turns and spacing from the config) at a pose.
CoilGeometry make_swarm_coil(const Config& cfg, double size, const Vec3& center, const Vec3& axis);

struct Swarm {
  std::vector<CoilGeometry> sensors;
  std::vector<CoilGeometry> relays;
  int attempts = 0;
};

/// Sensor of interest at the anchor, all other coils Gaussian about it
/// (sigma = sigma_in_sizes * size per coordinate) with uniform orientations.
/// A coil colliding with an already placed one is redrawn; SamplingError
/// once the attempt cap is exceeded.
Swarm sample_swarm(int n_relays, int n_sensors, const Vec3& anchor, double coil_size, std::uint64_t seed,
                   const Config& cfg);

/// Series capacitor that tunes an isolated relay coil to resonance at f.
double relay_capacitance(const CoilGeometry& coil, double f_hz);

/// Deterministic per-realization seed.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);

}  // namespace misim
