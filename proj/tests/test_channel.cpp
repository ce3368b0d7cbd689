#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kirchhoff.hpp"
#include "misim/channel.hpp"
#include "misim/linalg.hpp"
#include "random_systems.hpp"

using namespace misim;

namespace {
const Complex j(0.0, 1.0);

NoiseInputs siso_inputs(double x_couple, Complex z_a_out, double r_rad, Complex z_ra) {
  NoiseInputs in;
  in.z_a_out = ComplexMatrix::Constant(1, 1, z_a_out);
  const Complex den = z_ra + z_a_out;
  in.d_receive = ComplexMatrix::Constant(1, 1, j * x_couple / den);
  in.z_r_out = ComplexMatrix::Constant(1, 1, j * 3.0 - (j * x_couple) * (j * x_couple) / den);
  in.d_load = ComplexMatrix::Constant(1, 1, 50.0 / (50.0 + in.z_r_out(0, 0)));
  in.self_capacitance = RealVector::Zero(1);
  in.radiation_resistance = RealVector::Constant(1, r_rad);
  in.phi = RealMatrix::Identity(1, 1);
  in.frequency = 750e6;
  return in;
}
}  // namespace

TEST(Channel, PerGeneratorPowerMatchesKirchhoff) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index nt = 1 + t % 3;
    const Chain c = oracle::random_chain(nt, 2, rng, true);
    const ChainAnalysis an = analyze_chain(c);
    ComplexVector vg(nt);
    for (Eigen::Index i = 0; i < nt; ++i) vg[i] = Complex(g(rng), g(rng));
    const auto sol = oracle::solve_chain(c, vg);
    const RealMatrix re = 0.5 * (an.in.t.real() + an.in.t.real().transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(re);
    const RealMatrix root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    const ComplexVector x = root.cast<Complex>() * sol.i_gen;
    const RealVector p = per_generator_power(x * x.adjoint(), an.in.t);
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double expect = (std::conj(sol.i_gen[i]) * sol.v_gen_port[i]).real();
      EXPECT_NEAR(p[i], expect, 1e-9 * sol.generator_power) << t;
    }
    EXPECT_NEAR(p.sum(), x.squaredNorm(), 1e-9 * x.squaredNorm());
  }
}

TEST(Channel, ThermalEquilibriumSplitsLosses) {
  // one receive coil: R_rad = 0.4, ohmic 1.1
  const double rr = 0.4, ro = 1.1, x = 40.0;
  const Complex za_out(rr + ro, 18.0), z_ra(0.0, -22.0);
  const NoiseInputs in = siso_inputs(x, za_out, rr, z_ra);
  NoiseEnvironment env;
  env.lna.beta = 0.0;
  env.antenna_temperature = 1000.0;
  env.physical_temperature = 300.0;
  const double w = 1e5;
  const auto nb = noise_sources(env, in, w);
  const double den = std::norm(z_ra + za_out);
  const double kb = constants::kB;
  EXPECT_NEAR(nb.extrinsic(0, 0).real(), 4 * kb * 1000.0 * w * x * x * rr / den, 1e-9 * nb.extrinsic(0, 0).real());
  EXPECT_NEAR(nb.thermal(0, 0).real(), 4 * kb * 300.0 * w * x * x * ro / den, 1e-9 * nb.thermal(0, 0).real());
  // equal temperatures: Nyquist on Re Z_R^out
  env.antenna_temperature = 300.0;
  const auto eq = noise_sources(env, in, w);
  EXPECT_NEAR((eq.extrinsic + eq.thermal)(0, 0).real(), 4 * kb * 300.0 * w * in.z_r_out(0, 0).real(),
              1e-9 * eq.thermal(0, 0).real());
}

TEST(Channel, LnaNoiseFigureMinimizedAtZopt) {
  NoiseEnvironment env;
  env.antenna_temperature = env.physical_temperature = 0.0;
  env.lna.correlation = {0.4, -0.35};
  env.lna.noise_resistance = 60.0;
  NoiseInputs in = siso_inputs(10.0, {1.0, 0.0}, 0.5, {0.0, 0.0});
  double best = 1e300;
  Complex arg;
  for (double r = 5; r <= 150; r += 0.25)
    for (double xx = -80; xx <= 80; xx += 0.25) {
      in.z_r_out(0, 0) = Complex(r, xx);
      const double f = noise_sources(env, in, 1.0).lna(0, 0).real() / r;
      if (f < best) best = f, arg = in.z_r_out(0, 0);
    }
  const Complex zo = env.lna.z_opt();
  EXPECT_NEAR(arg.real(), zo.real(), 0.25);
  EXPECT_NEAR(arg.imag(), zo.imag(), 0.25);
}

TEST(Channel, CovarianceIsHermitianPsd) {
  std::mt19937_64 rng(5);
  const Eigen::Index n = 3;
  NoiseInputs in;
  in.z_r_out = oracle::random_passive(n, rng);
  in.z_a_out = oracle::random_passive(n, rng);
  in.d_load = 50.0 * (50.0 * ComplexMatrix::Identity(n, n) + in.z_r_out).inverse();
  in.d_receive = oracle::random_lossless(n, rng) * (oracle::random_passive(n, rng)).inverse();
  in.self_capacitance = RealVector::Constant(n, 1e-14);
  in.radiation_resistance = RealVector::Constant(n, 0.2);
  std::vector<CoilGeometry> coils(n);
  for (Eigen::Index i = 0; i < n; ++i) coils[static_cast<std::size_t>(i)].center = Vec3(0.03 * i, 0, 0);
  in.phi = spatial_correlation(coils, 750e6, CorrelationModel::Bessel);
  in.frequency = 750e6;
  NoiseEnvironment env;
  const ComplexMatrix k = build_noise_covariance(env, in, 1e5, 50.0);
  EXPECT_LT((k - k.adjoint()).norm(), 1e-14 * k.norm());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(k);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
}

TEST(Channel, BesselCorrelation) {
  std::vector<CoilGeometry> coils(3);
  coils[1].center = Vec3(0.1, 0, 0);
  coils[2].center = Vec3(0, 0.05, 0);
  coils[2].axis = Vec3(0, 1, 1).normalized();
  const double f = 750e6;
  const RealMatrix phi = spatial_correlation(coils, f, CorrelationModel::Bessel);
  const double k = 2 * constants::pi * f / constants::c0;
  EXPECT_DOUBLE_EQ(phi(0, 0), 1.0);
  EXPECT_NEAR(phi(0, 1), std::cyl_bessel_j(0.0, k * 0.1), 1e-15);
  EXPECT_NEAR(phi(2, 0), std::cyl_bessel_j(0.0, k * 0.05) / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(phi, phi.transpose());
  EXPECT_EQ(spatial_correlation(coils, f, CorrelationModel::Identity), RealMatrix::Identity(3, 3));
}
