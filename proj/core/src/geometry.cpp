#include "misim/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "misim/quadrature.hpp"

namespace misim {

using constants::pi;

std::pair<Vec3, Vec3> orthonormal_frame(const Vec3& axis) {
  const Vec3 o = axis.normalized();
  Vec3 e = Vec3::UnitX();
  if (std::abs(o.x()) > std::abs(o.y())) e = Vec3::UnitY();
  if (std::abs(o.dot(e)) > std::abs(o.z())) e = Vec3::UnitZ();
  Vec3 u = o.cross(e).normalized();
  Vec3 v = o.cross(u);
  return {u, v};
}

Eigen::Matrix3d rotation_about(const Vec3& hinge, double angle) {
  return Eigen::AngleAxisd(angle, hinge.normalized()).toRotationMatrix();
}

CoilGeometry transformed(const CoilGeometry& geom, const Eigen::Matrix3d& rotation, const Vec3& shift) {
  CoilGeometry g = geom;
  g.center = rotation * geom.center + shift;
  g.axis = (rotation * geom.axis).normalized();
  return g;
}

CoilPose::CoilPose(CoilGeometry geometry) : geometry_(std::move(geometry)) {
  validate(geometry_);
  std::tie(u_, v_) = orthonormal_frame(geometry_.axis);
}

double CoilPose::parameter_end() const { return 2.0 * pi * geometry_.turns; }

Vec3 CoilPose::point(double t) const {
  const auto& g = geometry_;
  const double lift = g.pitch() * t / (2.0 * pi) - 0.5 * g.height();
  return g.center + g.loop_radius * (std::cos(t) * u_ + std::sin(t) * v_) + lift * g.axis;
}

Vec3 CoilPose::tangent(double t) const {
  const auto& g = geometry_;
  return g.loop_radius * (-std::sin(t) * u_ + std::cos(t) * v_) + g.pitch() / (2.0 * pi) * g.axis;
}

CurveSamples CoilPose::sample(int points_per_turn, bool return_lead) const {
  const auto& rule = gauss_legendre(points_per_turn);
  CurveSamples s;
  const int turns = geometry_.turns;
  s.points.reserve(static_cast<std::size_t>(turns * points_per_turn));
  s.dl.reserve(s.points.capacity());
  for (int turn = 0; turn < turns; ++turn) {
    const double t0 = 2.0 * pi * turn;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = t0 + pi * (rule.nodes[i] + 1.0);
      s.points.push_back(point(t));
      s.dl.push_back(tangent(t) * (pi * rule.weights[i]));
    }
  }
  if (return_lead && turns > 1) {
    // radial stub to the axis, back down the axis, radial stub out to the start
    const Vec3 end = point(parameter_end());
    const Vec3 start = point(0.0);
    const Vec3 top = geometry_.center + (end - geometry_.center).dot(geometry_.axis) * geometry_.axis;
    const Vec3 bottom = geometry_.center + (start - geometry_.center).dot(geometry_.axis) * geometry_.axis;
    for (const auto& [a, b] : {std::pair{end, top}, std::pair{top, bottom}, std::pair{bottom, start}}) {
      const Vec3 span = b - a;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        s.points.push_back(a + 0.5 * (rule.nodes[i] + 1.0) * span);
        s.dl.push_back(0.5 * rule.weights[i] * span);
      }
    }
  }
  return s;
}

namespace {

struct SolidCylinder {
  Vec3 center;
  Vec3 axis;
  double radius;
  double half_height;

  Vec3 project(const Vec3& q) const {
    const Vec3 rel = q - center;
    const double z = rel.dot(axis);
    Vec3 radial = rel - z * axis;
    const double r = radial.norm();
    if (r > radius) radial *= radius / r;
    return center + std::clamp(z, -half_height, half_height) * axis + radial;
  }
};

SolidCylinder bounding(const CoilGeometry& g, double margin) {
  const double grow = 1.0 + margin;
  return {g.center, g.axis.normalized(), grow * (g.loop_radius + g.wire_radius),
          grow * (0.5 * g.height() + g.wire_radius)};
}

}  // namespace

bool cylinders_collide(const CoilGeometry& a, const CoilGeometry& b, double margin) {
  const SolidCylinder ca = bounding(a, margin);
  const SolidCylinder cb = bounding(b, margin);
  const double ra = std::hypot(ca.radius, ca.half_height);
  const double rb = std::hypot(cb.radius, cb.half_height);
  const double dist = (ca.center - cb.center).norm();
  if (dist > ra + rb) return false;
  if (dist < std::max(ca.radius, cb.radius) * 1e-9) return true;
  // Alternating projections converge to a closest pair of points.
  const double tol = 1e-9 * std::max(ra, rb);
  Vec3 x = ca.center;
  for (int it = 0; it < 2000; ++it) {
    const Vec3 y = cb.project(x);
    const Vec3 xn = ca.project(y);
    if ((xn - y).norm() < tol) return true;
    if ((xn - x).norm() < 1e-3 * tol) return false;
    x = xn;
  }
  return false;
}

std::vector<Vec3> fibonacci_sphere(int count) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

}  // namespace misim
