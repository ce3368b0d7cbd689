#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "misim/geometry.hpp"
#include "misim/quadrature.hpp"

using namespace misim;

TEST(Geometry, FrameIsOrthonormal) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const Vec3 o = random_unit_vector(rng);
    auto [u, v] = orthonormal_frame(o);
    EXPECT_NEAR(u.norm(), 1.0, 1e-14);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    EXPECT_NEAR(u.dot(o), 0.0, 1e-14);
    EXPECT_NEAR(v.dot(o), 0.0, 1e-14);
    EXPECT_NEAR(u.cross(v).dot(o), 1.0, 1e-14);
  }
}

TEST(Geometry, GaussLegendreIntegratesPolynomials) {
  const auto& rule = gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 14);
  EXPECT_NEAR(s, 2.0 / 15.0, 1e-14);
}

TEST(Geometry, SampledLengthMatchesHelix) {
  for (int turns : {1, 5}) {
    const CoilGeometry g = turns == 1 ? make_loop_coil(0.1, 3e-3) : make_sensor_coil(350e-6);
    const CoilPose pose(g);
    const CurveSamples s = pose.sample(16);
    double len = 0.0;
    for (const auto& d : s.dl) len += d.norm();
    EXPECT_NEAR(len / pose.curve_length(), 1.0, 1e-12);
  }
}

TEST(Geometry, HelixIsCenteredAndSpansHeight) {
  const CoilGeometry g = make_sensor_coil(300e-6, 5, 1.5, Vec3(1, 2, 3), Vec3(0, 1, 0));
  const CoilPose pose(g);
  const Vec3 first = pose.point(0.0) - g.center;
  const Vec3 last = pose.point(pose.parameter_end()) - g.center;
  EXPECT_NEAR(first.dot(g.axis), -0.5 * g.height(), 1e-15);
  EXPECT_NEAR(last.dot(g.axis), 0.5 * g.height(), 1e-15);
  EXPECT_NEAR((first - first.dot(g.axis) * g.axis).norm(), g.loop_radius, 1e-15);
}

namespace {
// Brute force: does any grid point of cylinder a lie inside cylinder b (both grown)?
bool brute_overlap(const CoilGeometry& a, const CoilGeometry& b, double margin) {
  const double ra = (1 + margin) * (a.loop_radius + a.wire_radius);
  const double ha = (1 + margin) * (0.5 * a.height() + a.wire_radius);
  const double rb = (1 + margin) * (b.loop_radius + b.wire_radius);
  const double hb = (1 + margin) * (0.5 * b.height() + b.wire_radius);
  auto [u, v] = orthonormal_frame(a.axis);
  const int n = 24;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k) {
        const double x = ra * (2.0 * i / n - 1), y = ra * (2.0 * j / n - 1), z = ha * (2.0 * k / n - 1);
        if (x * x + y * y > ra * ra) continue;
        const Vec3 p = a.center + x * u + y * v + z * a.axis;
        const Vec3 rel = p - b.center;
        const double zb = rel.dot(b.axis);
        if (std::abs(zb) <= hb && (rel - zb * b.axis).norm() <= rb) return true;
      }
  return false;
}
}  // namespace

TEST(Geometry, CollisionAgreesWithBruteForce) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 350e-6);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const CoilGeometry a = make_sensor_coil(350e-6, 5, 1.5, Vec3::Zero(), random_unit_vector(rng));
    const CoilGeometry b =
        make_sensor_coil(350e-6, 5, 1.5, Vec3(g(rng), g(rng), g(rng)), random_unit_vector(rng));
    const bool fast = cylinders_collide(a, b, 0.1);
    const bool slow = brute_overlap(a, b, 0.1) || brute_overlap(b, a, 0.1);
    // the grid can miss thin overlaps, never invent them
    if (slow) EXPECT_TRUE(fast) << t;
    if (!fast) EXPECT_FALSE(slow) << t;
    ++checked;
  }
  EXPECT_EQ(checked, 300);
}

TEST(Geometry, SeparatedCoilsDoNotCollide) {
  const CoilGeometry a = make_sensor_coil(350e-6);
  const CoilGeometry b = make_sensor_coil(350e-6, 5, 1.5, Vec3(0, 0, 2e-3));
  EXPECT_FALSE(cylinders_collide(a, b, 0.1));
  const CoilGeometry c = make_sensor_coil(350e-6, 5, 1.5, Vec3(0, 0, 300e-6));
  EXPECT_TRUE(cylinders_collide(a, c, 0.1));
}

TEST(Geometry, FibonacciSphereUnitAndBalanced) {
  const auto pts = fibonacci_sphere(26);
  Vec3 sum = Vec3::Zero();
  for (const auto& p : pts) {
    EXPECT_NEAR(p.norm(), 1.0, 1e-14);
    sum += p;
  }
  EXPECT_LT(sum.norm(), 0.2);
}

TEST(Geometry, RigidTransformKeepsUnitAxis) {
  const CoilGeometry g = make_sensor_coil(350e-6, 5, 1.5, Vec3(1, 0, 0), Vec3(0, 0, 1));
  const CoilGeometry t = transformed(g, rotation_about(Vec3(0, 1, 0), 0.5 * constants::pi), Vec3(0, 0, 1));
  EXPECT_NEAR(t.axis.norm(), 1.0, 1e-15);
  EXPECT_NEAR((t.center - Vec3(0, 0, 0)).norm(), 0.0, 1e-15);
}
