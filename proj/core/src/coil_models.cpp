#include "misim/coil_models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace misim {

using constants::pi;

double CoilGeometry::wire_length() const {
  const double circ = 2.0 * pi * loop_radius;
  if (turns <= 1) return circ;
  return turns * std::hypot(circ, pitch());
}

void validate(const CoilGeometry& geom) {
  std::ostringstream os;
  if (std::abs(geom.axis.norm() - 1.0) > 1e-12) os << "axis is not a unit vector; ";
  if (!(geom.turns >= 1)) os << "turns must be >= 1; ";
  if (!(geom.wire_radius > 0.0)) os << "wire_radius must be > 0; ";
  if (!(geom.loop_radius > geom.wire_radius)) os << "loop_radius must exceed wire_radius; ";
  if (geom.turns > 1 && !(geom.turn_spacing_factor >= 1.0)) os << "turn_spacing_factor must be >= 1; ";
  if (!(geom.material_conductivity > 0.0)) os << "material_conductivity must be > 0; ";
  if (!geom.center.allFinite()) os << "center is not finite; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw DomainError("invalid coil geometry: " + msg);
}

CoilGeometry make_sensor_coil(double size, int turns, double spacing_factor, const Vec3& center, const Vec3& axis) {
  CoilGeometry g;
  g.center = center;
  g.axis = axis.normalized();
  g.turns = turns;
  g.turn_spacing_factor = spacing_factor;
  g.wire_radius = size / (2.0 * turns * spacing_factor);
  g.loop_radius = 0.5 * size + g.wire_radius;
  validate(g);
  return g;
}

CoilGeometry make_loop_coil(double circumference, double wire_diameter, const Vec3& center, const Vec3& axis) {
  CoilGeometry g;
  g.center = center;
  g.axis = axis.normalized();
  g.turns = 1;
  g.loop_radius = circumference / (2.0 * pi);
  g.wire_radius = 0.5 * wire_diameter;
  validate(g);
  return g;
}

Complex CoilCircuit::series_impedance() const {
  return {ohmic_resistance + radiation_resistance, angular(frequency) * inductance};
}

Complex CoilCircuit::port_impedance() const {
  const Complex zs = series_impedance();
  return zs / (1.0 + kJ * angular(frequency) * self_capacitance * zs);
}

// Lorenz's current-sheet formula, written with Nagaoka's coefficient
//   K = 4/(3 pi k') [ (k'^2/k^2)(K(k) - E(k)) + E(k) - k ],  k^2 = D^2/(D^2 + l^2)
double nagaoka_coefficient(double diameter_over_length) {
  if (!(diameter_over_length > 0.0)) throw DomainError("nagaoka_coefficient: ratio must be > 0");
  const double x = diameter_over_length;
  const double k2 = x * x / (1.0 + x * x);
  const double k = std::sqrt(k2);
  const double kp = std::sqrt(1.0 - k2);
  const double kk = std::comp_ellint_1(k);
  const double ee = std::comp_ellint_2(k);
  return 4.0 / (3.0 * pi * kp) * ((1.0 - k2) / k2 * (kk - ee) + ee - k);
}

double rosa_mutual_correction(int turns) {
  // Rosa (1907), Table B; reproduced by summing Maxwell's coaxial-ring mutual
  // inductances (see tests/test_coil_models.cpp).
  static constexpr std::array<double, 11> table = {0.0,    0.0,    0.1137, 0.1663, 0.1973, 0.2180,
                                                   0.2329, 0.2443, 0.2532, 0.2604, 0.2664};
  if (turns < 1) throw DomainError("rosa_mutual_correction: turns must be >= 1");
  if (turns <= 10) return table[static_cast<std::size_t>(turns)];
  // Tail approaches ln(2 pi) - 3/2 like 1/N.
  constexpr double limit = 0.33787706640934534;
  return limit - (limit - table[10]) * 10.0 / turns;
}

// L = mu0 N^2 pi a^2 / l * K_N(2a/l) - mu0 a N (k_s + k_m)
//   k_s = 3/2 - ln(2 p / d_w)   (round wire vs. strip, surface current)
//   k_m = Rosa's table
// A flat single-turn loop uses L = mu0 a (ln(8a/r_w) - 2).
double solenoid_inductance(const CoilGeometry& geom) {
  validate(geom);
  const double a = geom.loop_radius;
  const double mu = constants::mu0;
  if (!geom.is_solenoid()) {
    return mu * a * (std::log(8.0 * a / geom.wire_radius) - 2.0);
  }
  const int n = geom.turns;
  const double p = geom.pitch();
  const double len = geom.height();
  const double sheet = mu * n * n * pi * a * a / len * nagaoka_coefficient(2.0 * a / len);
  const double ks = 1.5 - std::log(p / geom.wire_radius);
  const double km = rosa_mutual_correction(n);
  const double l = sheet - mu * a * n * (ks + km);
  if (!(l > 0.0)) throw DomainError("solenoid_inductance: non-physical geometry");
  return l;
}

double skin_depth(double f_hz, double conductivity) {
  return 1.0 / std::sqrt(pi * f_hz * constants::mu0 * conductivity);
}

double proximity_factor(double pitch_over_diameter, int turns) {
  // Resistance multiplier for close-wound single-layer coils, Medhurst-style
  // table keyed on pitch/wire-diameter (rows) and turn count (columns).
  static constexpr std::array<double, 6> pitches = {1.0, 1.25, 1.5, 2.0, 3.0, 4.0};
  static constexpr std::array<double, 7> counts = {1, 2, 3, 4, 5, 6, 8};
  static constexpr double table[6][7] = {
      {1.00, 1.38, 1.62, 1.78, 1.90, 1.98, 2.10},
      {1.00, 1.28, 1.45, 1.57, 1.64, 1.70, 1.78},
      {1.00, 1.20, 1.32, 1.40, 1.45, 1.49, 1.55},
      {1.00, 1.12, 1.19, 1.24, 1.27, 1.29, 1.32},
      {1.00, 1.05, 1.08, 1.10, 1.11, 1.12, 1.13},
      {1.00, 1.03, 1.04, 1.05, 1.06, 1.06, 1.07},
  };
  if (turns <= 1) return 1.0;
  const double n = std::min<double>(turns, counts.back());
  std::size_t ci = 0;
  while (ci + 2 < counts.size() && n > counts[ci + 1]) ++ci;
  const double tn = (n - counts[ci]) / (counts[ci + 1] - counts[ci]);
  auto row = [&](std::size_t r) { return table[r][ci] + tn * (table[r][ci + 1] - table[r][ci]); };

  const double x = std::max(pitch_over_diameter, pitches.front());
  if (x >= pitches.back()) {
    const double f4 = row(pitches.size() - 1);
    const double s = pitches.back() / x;
    return 1.0 + (f4 - 1.0) * s * s;
  }
  std::size_t ri = 0;
  while (ri + 2 < pitches.size() && x > pitches[ri + 1]) ++ri;
  const double tp = (x - pitches[ri]) / (pitches[ri + 1] - pitches[ri]);
  return row(ri) + tp * (row(ri + 1) - row(ri));
}

// R_dc = len / (sigma pi r_w^2). Skin effect: R_ac = R_dc (r_w/(2 delta) + 1/4)
// once r_w/delta > 4; below that, linear blend from R_dc at r_w/delta = 1. The
// proximity multiplier is blended in with the same weight (it vanishes at DC).
double ohmic_resistance(const CoilGeometry& geom, double f_hz) {
  validate(geom);
  if (!(f_hz > 0.0)) throw DomainError("ohmic_resistance: frequency must be > 0");
  const double rw = geom.wire_radius;
  const double rdc = geom.wire_length() / (geom.material_conductivity * pi * rw * rw);
  const double x = rw / skin_depth(f_hz, geom.material_conductivity);
  const double prox =
      geom.is_solenoid() ? proximity_factor(geom.turn_spacing_factor, geom.turns) : 1.0;
  if (x >= 4.0) return rdc * (0.5 * x + 0.25) * prox;
  const double w = std::clamp((x - 1.0) / 3.0, 0.0, 1.0);
  return rdc * (1.0 + 1.25 * w) * (1.0 + (prox - 1.0) * w);
}

// R_rad = (1/3) mu k^3 f nu^2 S^2
double radiation_resistance(double f_hz, int turns, double area) {
  if (!(f_hz > 0.0)) throw DomainError("radiation_resistance: frequency must be > 0");
  if (area < 0.0) throw DomainError("radiation_resistance: area must be >= 0");
  // mu k^3 f (nu S)^2 / 3 with the free-space impedance taken as 120 pi,
  // i.e. 320 pi^4 (nu S)^2 / lambda^4
  const double lambda = constants::c0 / f_hz;
  const double ns = static_cast<double>(turns) * area / (lambda * lambda);
  return 320.0 * std::pow(constants::pi, 4) * ns * ns;
}

// Solenoids: C = (4 eps0 / pi) l (1 + k_c), k_c = 0.717439 x + 0.933048 x^1.5 + 0.106835 x^2,
// x = D/l (Knight's fit, air core, no coil former dielectric).
// Flat loops: 0.1 pF per meter of circumference (stray/gap capacitance).
double self_capacitance(const CoilGeometry& geom) {
  validate(geom);
  if (!geom.is_solenoid()) return 0.1e-12 * 2.0 * pi * geom.loop_radius;
  const double len = geom.height();
  const double x = 2.0 * geom.loop_radius / len;
  const double kc = 0.717439 * x + 0.933048 * std::pow(x, 1.5) + 0.106835 * x * x;
  return 4.0 * constants::eps0 / pi * len * (1.0 + kc);
}

double quality_factor(const CoilCircuit& circ, double f_hz) {
  if (!(f_hz > 0.0)) throw DomainError("quality_factor: frequency must be > 0");
  return angular(f_hz) * circ.inductance / (circ.ohmic_resistance + circ.radiation_resistance);
}

CoilCircuit coil_circuit(const CoilGeometry& geom, double f_hz) {
  CoilCircuit c;
  c.inductance = solenoid_inductance(geom);
  c.ohmic_resistance = ohmic_resistance(geom, f_hz);
  c.radiation_resistance = radiation_resistance(f_hz, geom.turns, geom.area());
  c.self_capacitance = self_capacitance(geom);
  c.frequency = f_hz;
  return c;
}

double resonance_capacitance(double inductance, double f_hz) {
  if (!(inductance > 0.0) || !(f_hz > 0.0)) throw DomainError("resonance_capacitance: L and f must be > 0");
  const double w = angular(f_hz);
  return 1.0 / (w * w * inductance);
}

}  // namespace misim
