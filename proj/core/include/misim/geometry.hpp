#pragma once

#include <random>
#include <vector>

#include "misim/coil_models.hpp"
#include "misim/types.hpp"

namespace misim {

/// Orthonormal pair (u, v) completing `axis` to a right-handed frame.
std::pair<Vec3, Vec3> orthonormal_frame(const Vec3& axis);

/// Rotation taking +z to `axis`'s direction after tilting by `angle` radians
/// about `hinge` (unit vector).
Eigen::Matrix3d rotation_about(const Vec3& hinge, double angle);

/// Rigid motion applied to a coil (rotation about the origin, then shift).
CoilGeometry transformed(const CoilGeometry& geom, const Eigen::Matrix3d& rotation, const Vec3& shift);

/// Quadrature discretization of a coil's wire centerline: positions and
/// weighted tangent vectors (ds = r'(t) w dt), one Gauss-Legendre panel per turn.
struct CurveSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> dl;
};

/// Coil with its parametric centerline (circle or constant-pitch helix).
class CoilPose {
 public:
  explicit CoilPose(CoilGeometry geometry);

  const CoilGeometry& geometry() const { return geometry_; }
  /// Point on the centerline, t in [0, 2 pi turns].
  Vec3 point(double t) const;
  Vec3 tangent(double t) const;
  double parameter_end() const;
  /// Centerline length from the closed form (helix pitch included).
  double curve_length() const { return geometry_.wire_length(); }
  /// Winding samples. With the return lead a helix is closed by a wire back
  /// along its axis, so no net axial current is left (an open helix couples
  /// like a short straight wire at long range).
  CurveSamples sample(int points_per_turn, bool return_lead = false) const;

 private:
  CoilGeometry geometry_;
  Vec3 u_;
  Vec3 v_;
};

/// Bounding-cylinder overlap test; radii and half-heights grown by `margin`
/// (0.1 = 10 %). Exact for solid cylinders up to the projection tolerance.
bool cylinders_collide(const CoilGeometry& a, const CoilGeometry& b, double margin);

/// Uniformly distributed unit vector.
template <typename Rng>
Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vec3 v(n(rng), n(rng), n(rng));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

/// Near-uniform point set on the unit sphere (Fibonacci lattice).
std::vector<Vec3> fibonacci_sphere(int count);

}  // namespace misim
