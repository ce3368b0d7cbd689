#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "misim/channel.hpp"
#include "misim/coop.hpp"
#include "random_systems.hpp"

using namespace misim;

namespace {
ComplexMatrix random_gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = Complex(g(rng), g(rng));
  return m;
}

double logdet_rate(const ComplexMatrix& h, const ComplexMatrix& q) {
  const ComplexMatrix m = ComplexMatrix::Identity(h.rows(), h.rows()) + h * q * h.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
  return es.eigenvalues().array().log().sum() / std::log(2.0);
}
}  // namespace

TEST(Coop, NodeMatricesSumToIdentityAndGivePower) {
  std::mt19937_64 rng(1);
  const ComplexMatrix z = oracle::random_passive(3, rng);
  const auto b = node_power_matrices(z);
  ComplexMatrix sum = ComplexMatrix::Zero(3, 3);
  for (const auto& m : b) sum += m;
  EXPECT_LT((sum - ComplexMatrix::Identity(3, 3)).norm(), 1e-12);
  const ComplexMatrix g = random_gaussian(3, 3, rng);
  const ComplexMatrix q = g * g.adjoint();
  const RealVector p = per_generator_power(q, z);
  for (int n = 0; n < 3; ++n) EXPECT_NEAR((q * b[n]).trace().real(), p[n], 1e-12 * p.cwiseAbs().sum());
}

TEST(Coop, DecoupledNodesUseFullBudgets) {
  ComplexMatrix h = ComplexMatrix::Zero(3, 2);
  h(0, 0) = 2.0;
  h(1, 1) = Complex(0.0, 0.5);
  std::vector<ComplexMatrix> b(2, ComplexMatrix::Zero(2, 2));
  b[0](0, 0) = b[1](1, 1) = 1.0;
  const RealVector p = (RealVector(2) << 0.3, 2.0).finished();
  LogDetOptions opts;
  opts.gap_tol = 1e-9;
  const auto r = max_logdet_per_node(h, b, p, opts);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.rate, std::log2(1 + 4 * 0.3) + std::log2(1 + 0.25 * 2.0), 1e-6);
}

TEST(Coop, SumPowerMatchesWaterfillOnSingularValues) {
  std::mt19937_64 rng(3);
  const ComplexMatrix h = random_gaussian(3, 2, rng);
  const auto r = max_logdet_sum_power(h, 1.7);
  Eigen::JacobiSVD<ComplexMatrix> svd(h);
  const RealVector s = svd.singularValues();
  double best = 0;
  for (int k = 0; k <= 10000; ++k) {
    const double a = 1.7 * k / 10000.0;
    best = std::max(best, std::log2(1 + s[0] * s[0] * a) + std::log2(1 + s[1] * s[1] * (1.7 - a)));
  }
  EXPECT_NEAR(r.rate, best, 1e-6);
  EXPECT_NEAR(r.q.trace().real(), 1.7, 1e-9);
}

TEST(Coop, PerNodeOptimumBeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index nodes = 2 + trial % 3;
    const ComplexMatrix h = random_gaussian(3, nodes, rng) * 0.7;
    const ComplexMatrix z = oracle::random_passive(nodes, rng);
    const auto b = node_power_matrices(z);
    RealVector p(nodes);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (Eigen::Index n = 0; n < nodes; ++n) p[n] = u(rng);
    const auto r = max_logdet_per_node(h, b, p);
    EXPECT_LT(r.relative_gap, 1e-5) << trial;
    EXPECT_GE(r.dual_bound, r.rate - 1e-9);
    EXPECT_NEAR(logdet_rate(h, r.q), r.rate, 1e-9);
    for (Eigen::Index n = 0; n < nodes; ++n)
      EXPECT_LE((r.q * b[static_cast<std::size_t>(n)]).trace().real(), p[n] * (1 + 1e-9));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r.q);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12 * r.q.norm());
    for (int s = 0; s < 300; ++s) {
      const ComplexMatrix g = random_gaussian(nodes, 1 + s % static_cast<int>(nodes), rng);
      ComplexMatrix q = g * g.adjoint();
      // node powers can be negative (power exchanged through coupling)
      double scale = 1e300;
      for (Eigen::Index n = 0; n < nodes; ++n) {
        const double used = (q * b[static_cast<std::size_t>(n)]).trace().real();
        if (used > 0.0) scale = std::min(scale, p[n] / used);
      }
      if (scale == 1e300) continue;
      q *= scale;
      EXPECT_LE(logdet_rate(h, q), r.rate + 1e-9) << trial;
    }
  }
}

TEST(Coop, SingleNodeClosedForm) {
  std::mt19937_64 rng(4);
  const ComplexMatrix h = random_gaussian(4, 1, rng);
  std::vector<ComplexMatrix> b{ComplexMatrix::Identity(1, 1)};
  const auto r = max_logdet_per_node(h, b, RealVector::Constant(1, 0.8));
  EXPECT_NEAR(r.rate, std::log2(1 + 0.8 * h.squaredNorm()), 1e-12);
}

TEST(Coop, UplinkRateSumsBins) {
  std::mt19937_64 rng(6);
  std::vector<CoopUplinkBin> bins(2);
  for (auto& bin : bins) {
    bin.h_white = random_gaussian(3, 2, rng);
    bin.z_t_in = oracle::random_passive(2, rng);
  }
  const RealVector p = (RealVector(2) << 1.0, 0.5).finished();
  const RateResult r = coop_uplink_rate(bins, p, 1e5, false);
  ASSERT_EQ(r.per_bin_rate.size(), 2);
  EXPECT_NEAR(r.total_rate, r.per_bin_rate.sum(), 1e-9 * r.total_rate);
  const auto single = max_logdet_per_node(bins[0].h_white, node_power_matrices(bins[0].z_t_in), p / 2.0);
  EXPECT_NEAR(r.per_bin_rate[0], 1e5 * single.rate, 1e-6 * r.per_bin_rate[0]);
  const RateResult rh = coop_uplink_rate(bins, p, 1e5, true);
  EXPECT_GT(rh.total_rate, 0.0);
  for (Eigen::Index n = 0; n < 2; ++n) EXPECT_LE(rh.per_bin_power.col(n).sum(), p[n] * (1 + 1e-9));
}

// Wide SNR range, fewer receivers than nodes, strongly coupled nodes: the
// optimum often sits on the PSD boundary, where dual descent alone stalls.
TEST(Coop, PerNodeSolverClosesGapAcrossScales) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int open = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index nodes = 2 + trial % 4;
    const ComplexMatrix h = random_gaussian(1 + trial % 5, nodes, rng) * std::pow(10.0, u(rng));
    const auto b = node_power_matrices(oracle::random_passive(nodes, rng, std::pow(10.0, u(rng))));
    RealVector p(nodes);
    for (auto& x : p) x = 1e-3 * std::pow(10.0, u(rng));
    LogDetOptions opts;
    opts.gap_tol = 1e-7;
    const auto r = max_logdet_per_node(h, b, p, opts);
    EXPECT_LT(r.relative_gap, 1e-5) << trial;
    EXPECT_NEAR(logdet_rate(h, r.q), r.rate, 1e-9 * std::max(1.0, r.rate));
    for (Eigen::Index n = 0; n < nodes; ++n)
      EXPECT_LE((r.q * b[static_cast<std::size_t>(n)]).trace().real(), p[n] * (1 + 1e-9));
    if (!r.converged) ++open;
  }
  EXPECT_LE(open, 3);
}
