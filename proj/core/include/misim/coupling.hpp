#pragma once

#include <vector>

#include "misim/coil_models.hpp"
#include "misim/geometry.hpp"
#include "misim/types.hpp"

namespace misim {

struct OrientationFactors {
  double j_nf = 0.0;
  double j_ff = 0.0;
  Vec3 direction = Vec3::UnitZ();  // unit vector from coil m to coil n
  double distance = 0.0;
};

OrientationFactors orientation_factors(const CoilGeometry& m, const CoilGeometry& n);

struct QuadratureOptions {
  int initial_points_per_turn = 32;
  int max_points_per_turn = 512;
  double rel_tol = 1e-4;
};

/// (j w mu / 4 pi) * double line integral of exp(-jkd)/d ds_m . ds_n over both
/// centerlines, refined until the relative change drops below rel_tol.
Complex mutual_impedance_integral(const CoilPose& a, const CoilPose& b, double f_hz,
                                  const QuadratureOptions& opts = {});

/// Magnetoquasistatic mutual inductance (Neumann), same quadrature.
double neumann_mutual_inductance(const CoilPose& a, const CoilPose& b, const QuadratureOptions& opts = {});

/// Dipole approximation with near- and far-field terms.
Complex mutual_impedance_dipole(const CoilGeometry& m, const CoilGeometry& n, double f_hz);

struct CouplingOptions {
  /// Dipole model when center distance > use_dipole_beyond * larger coil diameter.
  double use_dipole_beyond = 4.0;
  QuadratureOptions quadrature{};
  /// Band over which the integral pairs are pre-expanded in frequency; pairs
  /// evaluated outside it fall back to direct quadrature.
  double band_lo_hz = 0.0;
  double band_hi_hz = 0.0;
};

/// Mutual coupling of a fixed coil set. Integral pairs are expanded once
/// around the band center,
///   exp(-jkd) = exp(-jk0 d) sum_n (-j(k-k0) d)^n / n!,
/// so that per-frequency evaluation reduces to a short polynomial.
class CouplingModel {
 public:
  CouplingModel(std::vector<CoilPose> coils, CouplingOptions options);
  /// base's coils followed by extra; pairs among base coils are reused.
  CouplingModel(const CouplingModel& base, const std::vector<CoilPose>& extra);

  std::size_t size() const { return coils_.size(); }
  const std::vector<CoilPose>& coils() const { return coils_; }
  const CouplingOptions& options() const { return options_; }

  /// Impedance matrix without the self-capacitances (Z-bar).
  ComplexMatrix bare_matrix(double f_hz) const;
  /// Z_A = (Zbar^-1 + jw diag(C_self))^-1.
  ComplexMatrix antenna_matrix(double f_hz) const;
  std::vector<CoilCircuit> circuits(double f_hz) const;
  Complex mutual(std::size_t m, std::size_t n, double f_hz) const;
  bool uses_integral(std::size_t m, std::size_t n) const;

 private:
  enum class PairKind { Dipole, Expanded, Direct };
  struct Pair {
    PairKind kind = PairKind::Dipole;
    double k0 = 0.0;
    double max_dk = 0.0;
    std::vector<Complex> moments;  // J_n = sum w exp(-j k0 d) d^(n-1), pre-divided by n!
    int points_per_turn = 32;
  };
  const Pair& pair(std::size_t m, std::size_t n) const;
  Pair build_pair(std::size_t m, std::size_t q) const;

  std::vector<CoilPose> coils_;
  CouplingOptions options_;
  std::vector<Pair> pairs_;  // upper triangle, row-major
};

/// Convenience wrapper: Z_A for one frequency.
ComplexMatrix assemble_antenna_matrix(const std::vector<CoilPose>& coils, double f_hz,
                                      double use_dipole_beyond = 4.0);

/// Z_A|no relays - Z_to^T (Z_relays + Z_term)^-1 Z_to with the relays being
/// the trailing ports of z_full.
ComplexMatrix reduce_passive_relays(const ComplexMatrix& z_full, Eigen::Index n_active, const ComplexMatrix& z_term);

/// Resistance used to represent an open circuit.
inline constexpr double kOpenCircuitOhms = 1e12;

}  // namespace misim
