#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "misim/link.hpp"

using namespace misim;

namespace {
ComplexVector random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(g(rng), g(rng));
  return v.normalized();
}
}  // namespace

TEST(Link, PowerBudget) {
  auto b = make_power_budget(3e-6, 1e-6);
  EXPECT_FALSE(b.in_outage);
  EXPECT_DOUBLE_EQ(b.uplink_power, 1e-6);
  b = make_power_budget(0.5e-6, 1e-6);
  EXPECT_TRUE(b.in_outage);
  EXPECT_EQ(b.uplink_power, 0.0);
}

TEST(Link, WaterfillBeatsGrid) {
  const RealVector g = (RealVector(3) << 2.0, 0.7, 0.05).finished();
  const double p = 1.5, w = 1e5;
  const RateResult r = waterfill(g, p, w);
  EXPECT_NEAR(r.per_bin_power.sum(), p, 1e-12);
  double best = 0.0;
  const int n = 300;
  for (int a = 0; a <= n; ++a)
    for (int b = 0; a + b <= n; ++b) {
      const double pa = p * a / n, pb = p * b / n, pc = p - pa - pb;
      best = std::max(best, w * (std::log2(1 + g[0] * pa) + std::log2(1 + g[1] * pb) + std::log2(1 + g[2] * pc)));
    }
  EXPECT_GE(r.total_rate, best - 1e-9 * best);
  EXPECT_LT(r.total_rate - best, 1e-3 * best);
  EXPECT_EQ(r.per_bin_power(2, 0), 0.0);  // 1/g too large to be filled
  EXPECT_LT(r.kkt_residual, 1e-9);
}

TEST(Link, WaterfillNoGain) {
  const RateResult r = waterfill(RealVector::Zero(4), 1.0, 1e5);
  EXPECT_TRUE(r.unallocated);
  EXPECT_EQ(r.total_rate, 0.0);
}

TEST(Link, FlatAllocation) {
  const RealVector g = (RealVector(3) << 1.0, 2.0, 3.0).finished();
  const RateResult r = flat_allocation(g, {true, false, true}, 2.0, 10.0);
  EXPECT_DOUBLE_EQ(r.per_bin_power(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(r.per_bin_power(1, 0), 0.0);
  EXPECT_NEAR(r.total_rate, 10.0 * (1.0 + 2.0), 1e-12);
}

TEST(Link, MrtIsOptimalForOneReceiver) {
  std::mt19937_64 rng(2);
  const ComplexVector h = random_unit(4, rng) * 0.3;
  const DownlinkBeam b = mrt_downlink(h, 1.0);
  EXPECT_NEAR(b.pte, h.squaredNorm(), 1e-15);
  EXPECT_NEAR(std::norm(h.dot(b.beamformer.conjugate())), b.pte, 1e-14);
  for (int t = 0; t < 1000; ++t) EXPECT_LE(std::norm(h.dot(random_unit(4, rng).conjugate())), b.pte + 1e-15);
}

TEST(Link, CoopDownlinkAgainstSampling) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  ComplexMatrix h(3, 2);
  for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = Complex(g(rng), g(rng));
  h.row(0) *= 0.2;  // weak target
  const double pt = 1.0;
  const double cap = h.row(0).squaredNorm();
  const double p0 = 0.6 * cap;
  const DownlinkBeam b = coop_downlink_beamform(h, pt, p0, 0);
  ASSERT_TRUE(b.constraint_met);
  EXPECT_NEAR(b.beamformer.norm(), 1.0, 1e-12);
  EXPECT_GE(b.pte * pt, p0 * (1 - 1e-9));
  double best = 0.0;
  for (int t = 0; t < 200000; ++t) {
    const ComplexVector w = random_unit(2, rng);
    if (std::norm((h.row(0) * w)(0)) * pt < p0) continue;
    best = std::max(best, (h * w).squaredNorm());
  }
  EXPECT_GE(b.sum_pte, best * (1 - 1e-9));
  EXPECT_LT(b.sum_pte, best * 1.01);

  const DownlinkBeam bad = coop_downlink_beamform(h, pt, 2.0 * cap, 0);
  EXPECT_TRUE(bad.outage);
  EXPECT_FALSE(bad.constraint_met);
  EXPECT_NEAR(bad.pte, cap, 1e-12);
}

TEST(Link, WhitenedGain) {
  ComplexMatrix k(2, 2);
  k << 2.0, Complex(0.3, 0.4), Complex(0.3, -0.4), 1.0;
  ComplexVector h(2);
  h << Complex(1.0, 2.0), Complex(-0.5, 0.1);
  const double expect = (h.adjoint() * k.inverse() * h)(0).real();
  EXPECT_NEAR(whitened_mrc_gain(h, k), expect, 1e-12 * expect);
  const ComplexMatrix hw = whiten(h, k);
  EXPECT_NEAR(hw.squaredNorm(), expect, 1e-12 * expect);
  const ComplexMatrix wi = whiten(ComplexMatrix::Identity(2, 2), k);
  EXPECT_LT((wi.adjoint() * wi - k.inverse()).norm(), 1e-12);
}
