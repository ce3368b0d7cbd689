#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "misim/coupling.hpp"
#include "misim/linalg.hpp"
#include "random_systems.hpp"

using namespace misim;
using constants::mu0;

namespace {
double maxwell_rings(double a, double b, double d) {
  const double k2 = 4.0 * a * b / ((a + b) * (a + b) + d * d);
  const double k = std::sqrt(k2);
  return mu0 * std::sqrt(a * b) * ((2.0 / k - k) * std::comp_ellint_1(k) - 2.0 / k * std::comp_ellint_2(k));
}
}  // namespace

TEST(Coupling, OrientationFactorsCoaxialAndCoplanar) {
  const CoilGeometry a = make_loop_coil(0.1, 1e-3);
  const CoilGeometry b = make_loop_coil(0.1, 1e-3, Vec3(0, 0, 1));
  auto of = orientation_factors(a, b);
  EXPECT_DOUBLE_EQ(of.j_nf, 1.0);
  EXPECT_DOUBLE_EQ(of.j_ff, 0.0);
  const CoilGeometry c = make_loop_coil(0.1, 1e-3, Vec3(1, 0, 0));
  of = orientation_factors(a, c);
  EXPECT_DOUBLE_EQ(of.j_nf, -0.5);
  EXPECT_DOUBLE_EQ(of.j_ff, 1.0);
}

TEST(Coupling, NeumannMatchesMaxwellForCoaxialLoops) {
  const CoilGeometry a = make_loop_coil(0.1, 1e-3);
  for (double d : {0.01, 0.03, 0.1}) {
    const CoilGeometry b = make_loop_coil(0.1, 1e-3, Vec3(0, 0, d));
    const double ref = maxwell_rings(a.loop_radius, b.loop_radius, d);
    const double m = neumann_mutual_inductance(CoilPose(a), CoilPose(b), {32, 1024, 1e-8});
    EXPECT_NEAR(m / ref, 1.0, 1e-6) << d;
  }
}

TEST(Coupling, IntegralReducesToNeumannAtLowFrequency) {
  const CoilPose a(make_sensor_coil(350e-6));
  const CoilPose b(make_sensor_coil(350e-6, 5, 1.5, Vec3(1e-3, 2e-4, 3e-4), Vec3(0.6, 0, 0.8)));
  const double f = 1e3;
  const Complex z = mutual_impedance_integral(a, b, f);
  const double m = neumann_mutual_inductance(a, b);
  EXPECT_NEAR(z.imag() / (angular(f) * m), 1.0, 1e-6);
}

TEST(Coupling, IntegralIsReciprocal) {
  const CoilPose a(make_sensor_coil(300e-6, 5, 1.5, Vec3::Zero(), Vec3(0, 1, 0)));
  const CoilPose b(make_sensor_coil(350e-6, 5, 1.5, Vec3(1e-3, 2e-4, 3e-4), Vec3(0.6, 0, 0.8)));
  const Complex ab = mutual_impedance_integral(a, b, 750e6, {32, 512, 1e-8});
  const Complex ba = mutual_impedance_integral(b, a, 750e6, {32, 512, 1e-8});
  EXPECT_LT(std::abs(ab - ba) / std::abs(ab), 1e-7);
}

TEST(Coupling, DipoleApproachesIntegralWithDistance) {
  const CoilGeometry a = make_sensor_coil(350e-6, 5, 1.5, Vec3::Zero(), Vec3(0, 0, 1));
  const Vec3 dir = Vec3(1, 0.5, 0.3).normalized();
  const Vec3 axis_b = Vec3(0.3, 0.4, 0.866).normalized();
  const double diam = a.outer_diameter();
  double prev = 1e9;
  for (int i = 0; i < 20; ++i) {
    const double d = diam * (3.0 + i);
    const CoilGeometry b = make_sensor_coil(350e-6, 5, 1.5, d * dir, axis_b);
    const Complex zi = mutual_impedance_integral(CoilPose(a), CoilPose(b), 750e6, {32, 1024, 1e-9});
    const Complex zd = mutual_impedance_dipole(a, b, 750e6);
    const double err = std::abs(zd - zi) / std::abs(zi);
    EXPECT_LT(err, prev) << d;
    prev = err;
    if (i == 7) EXPECT_LT(err, 0.02);
  }
}

TEST(Coupling, ExpandedPairsMatchDirectQuadrature) {
  std::vector<CoilPose> coils = {CoilPose(make_loop_coil(0.1, 3e-3)),
                                 CoilPose(make_loop_coil(0.1, 3e-3, Vec3(0.05, 0.02, 0.01), Vec3(0, 0.6, 0.8))),
                                 CoilPose(make_sensor_coil(350e-6, 5, 1.5, Vec3(0, 0, -0.12)))};
  CouplingOptions opts;
  opts.band_lo_hz = 500e6;
  opts.band_hi_hz = 1000e6;
  opts.quadrature.rel_tol = 1e-8;
  opts.quadrature.max_points_per_turn = 2048;
  const CouplingModel model(coils, opts);
  for (double f : {500e6, 620e6, 750e6, 1000e6}) {
    for (std::size_t m = 0; m < 3; ++m)
      for (std::size_t n = m + 1; n < 3; ++n) {
        if (!model.uses_integral(m, n)) continue;
        const Complex ref = mutual_impedance_integral(coils[m], coils[n], f, opts.quadrature);
        EXPECT_LT(std::abs(model.mutual(m, n, f) - ref) / std::abs(ref), 1e-6) << f << " " << m << n;
      }
  }
}

TEST(Coupling, ExtendedModelEqualsFullModel) {
  std::vector<CoilPose> base = {CoilPose(make_loop_coil(0.1, 3e-3)),
                                CoilPose(make_loop_coil(0.1, 3e-3, Vec3(0.06, 0, 0)))};
  std::vector<CoilPose> extra = {CoilPose(make_sensor_coil(350e-6, 5, 1.5, Vec3(0, 0, -0.12))),
                                 CoilPose(make_sensor_coil(350e-6, 5, 1.5, Vec3(1e-3, 0, -0.12), Vec3(1, 0, 0)))};
  CouplingOptions opts;
  opts.band_lo_hz = 740e6;
  opts.band_hi_hz = 760e6;
  const CouplingModel b(base, opts);
  const CouplingModel ext(b, extra);
  std::vector<CoilPose> all = base;
  all.insert(all.end(), extra.begin(), extra.end());
  const CouplingModel full(all, opts);
  EXPECT_LT(oracle::rel_err(ext.antenna_matrix(750e6), full.antenna_matrix(750e6)), 1e-14);
}

TEST(Coupling, AntennaMatrixReciprocalAndPassive) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 525e-6);
  std::vector<CoilPose> coils;
  coils.emplace_back(make_sensor_coil(350e-6, 5, 1.5, Vec3::Zero(), random_unit_vector(rng)));
  while (coils.size() < 6) {
    const CoilGeometry c = make_sensor_coil(350e-6, 5, 1.5, Vec3(g(rng), g(rng), g(rng)), random_unit_vector(rng));
    bool ok = true;
    for (const auto& o : coils) ok = ok && !cylinders_collide(o.geometry(), c, 0.1);
    if (ok) coils.emplace_back(c);
  }
  CouplingOptions opts;
  opts.band_lo_hz = 700e6;
  opts.band_hi_hz = 800e6;
  const CouplingModel model(coils, opts);
  for (double f : {700e6, 750e6, 800e6}) {
    const ComplexMatrix z = model.antenna_matrix(f);
    EXPECT_LT(linalg::symmetry_error(z), 1e-9);
    EXPECT_GE(linalg::min_real_part_eigenvalue_ratio(z), -1e-12);
  }
}

TEST(Coupling, SelfCapacitanceEntersInParallel) {
  const CoilGeometry g = make_sensor_coil(350e-6);
  const CouplingModel model({CoilPose(g)}, {});
  const Complex z = model.antenna_matrix(750e6)(0, 0);
  EXPECT_LT(std::abs(z - coil_circuit(g, 750e6).port_impedance()) / std::abs(z), 1e-13);
}

TEST(Coupling, RelayReductionEqualsFullSolve) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = 3 + t % 4;
    const Eigen::Index na = 1 + t % (n - 1);
    const ComplexMatrix z = oracle::random_passive(n, rng);
    const ComplexMatrix term = oracle::random_lossless(n - na, rng, 10.0).diagonal().asDiagonal();
    const ComplexMatrix red = reduce_passive_relays(z, na, term);
    ComplexMatrix loaded = z;
    loaded.bottomRightCorner(n - na, n - na) += term;
    // active block of the inverse of the loaded network is the inverse of the reduction
    const ComplexMatrix inv = loaded.inverse().topLeftCorner(na, na);
    EXPECT_LT(oracle::rel_err(red.inverse(), inv), 1e-10) << t;
  }
}

TEST(Coupling, IntersectingCoilsRejected) {
  const CoilPose a(make_sensor_coil(350e-6));
  const CoilPose b(make_sensor_coil(350e-6, 5, 1.5, Vec3(1e-6, 0, 0)));
  EXPECT_THROW(mutual_impedance_integral(a, b, 750e6), DomainError);
}
