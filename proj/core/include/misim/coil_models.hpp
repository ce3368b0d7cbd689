#pragma once

#include "misim/types.hpp"

namespace misim {

/// Physical description of one coil. A flat single-turn loop has
/// `turns == 1`; multi-turn coils are single-layer solenoids whose pitch is
/// `turn_spacing_factor * 2 * wire_radius` and whose height follows from it.
struct CoilGeometry {
  Vec3 center = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  int turns = 1;
  double loop_radius = 0.0;  // winding radius (wire centerline)
  double wire_radius = 0.0;
  double turn_spacing_factor = 1.5;
  double material_conductivity = constants::sigma_copper;

  double pitch() const { return turns > 1 ? turn_spacing_factor * 2.0 * wire_radius : 0.0; }
  double height() const { return turns > 1 ? turns * pitch() : 0.0; }
  double area() const { return constants::pi * loop_radius * loop_radius; }
  /// Outer diameter of the bounding cylinder.
  double outer_diameter() const { return 2.0 * (loop_radius + wire_radius); }
  /// Wire length along the helix (or circle).
  double wire_length() const;
  bool is_solenoid() const { return turns > 1; }
};

/// Throws DomainError unless the invariants hold (unit axis, r_w > 0, a > r_w,
/// turns >= 1, positive conductivity).
void validate(const CoilGeometry& geom);

/// Single-layer solenoid of the in-body sensors: 'size' is the former
/// diameter and the winding height equals it.
CoilGeometry make_sensor_coil(double size, int turns = 5, double spacing_factor = 1.5,
                              const Vec3& center = Vec3::Zero(), const Vec3& axis = Vec3::UnitZ());

/// Flat single-turn loop given its circumference and wire diameter.
CoilGeometry make_loop_coil(double circumference, double wire_diameter, const Vec3& center = Vec3::Zero(),
                            const Vec3& axis = Vec3::UnitZ());

struct CoilCircuit {
  double inductance = 0.0;
  double ohmic_resistance = 0.0;
  double radiation_resistance = 0.0;
  double self_capacitance = 0.0;
  double frequency = 0.0;

  /// Series impedance without the self-capacitance: R_ohm + R_rad + jwL.
  Complex series_impedance() const;
  /// Port impedance including the parallel self-capacitance.
  Complex port_impedance() const;
};

double solenoid_inductance(const CoilGeometry& geom);
double ohmic_resistance(const CoilGeometry& geom, double f_hz);
double radiation_resistance(double f_hz, int turns, double area);
double self_capacitance(const CoilGeometry& geom);
double quality_factor(const CoilCircuit& circ, double f_hz);

double skin_depth(double f_hz, double conductivity);

/// Multiplier (>= 1) applied to the skin-effect resistance to account for
/// current crowding between neighboring turns.
double proximity_factor(double pitch_over_diameter, int turns);

/// Nagaoka's coefficient for a current sheet of diameter/length ratio.
double nagaoka_coefficient(double diameter_over_length);

/// Rosa's mutual-inductance correction k_m for `turns` round-wire turns.
double rosa_mutual_correction(int turns);

/// Evaluates all equivalent-circuit parameters at f.
CoilCircuit coil_circuit(const CoilGeometry& geom, double f_hz);

/// Capacitance resonating an inductance at f: 1/(w^2 L).
double resonance_capacitance(double inductance, double f_hz);

}  // namespace misim
