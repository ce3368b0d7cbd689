#include <benchmark/benchmark.h>

#include <random>

#include "misim/coop.hpp"
#include "misim/coupling.hpp"
#include "misim/link.hpp"
#include "misim/multiport.hpp"
#include "misim/scenario.hpp"

using namespace misim;

namespace {

ComplexMatrix passive(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RealMatrix a(n, n), b(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a.data()[i] = g(rng);
    b.data()[i] = g(rng);
  }
  const RealMatrix re = a * a.transpose() + RealMatrix::Identity(n, n);
  const RealMatrix im = b + b.transpose();
  return 10.0 * (re.cast<Complex>() + kJ * im.cast<Complex>());
}

}  // namespace

static void BM_IntegralPairSensors(benchmark::State& st) {
  const CoilPose a(make_sensor_coil(350e-6));
  const CoilPose b(make_sensor_coil(350e-6, 5, 1.5, Vec3(6e-4, 2e-4, 1e-4), Vec3(0.6, 0, 0.8)));
  for (auto _ : st) benchmark::DoNotOptimize(mutual_impedance_integral(a, b, 750e6));
}
BENCHMARK(BM_IntegralPairSensors)->Unit(benchmark::kMicrosecond);

static void BM_SwarmCouplingModel(benchmark::State& st) {
  const Config cfg;
  CouplingOptions opts = cfg.coupling;
  opts.band_lo_hz = cfg.spectrum.f_lo;
  opts.band_hi_hz = cfg.spectrum.f_hi;
  const CouplingModel base(build_external_array(cfg.array), opts);
  const Swarm sw = sample_swarm(19, 1, sensor_anchor(cfg), 350e-6, 3, cfg);
  std::vector<CoilPose> extra;
  for (const auto& g : sw.sensors) extra.emplace_back(g);
  for (const auto& g : sw.relays) extra.emplace_back(g);
  for (auto _ : st) {
    const CouplingModel m(base, extra);
    benchmark::DoNotOptimize(m.size());
  }
}
BENCHMARK(BM_SwarmCouplingModel)->Unit(benchmark::kMillisecond);

static void BM_AntennaMatrix41(benchmark::State& st) {
  const Config cfg;
  CouplingOptions opts = cfg.coupling;
  opts.band_lo_hz = cfg.spectrum.f_lo;
  opts.band_hi_hz = cfg.spectrum.f_hi;
  const CouplingModel base(build_external_array(cfg.array), opts);
  const Swarm sw = sample_swarm(19, 1, sensor_anchor(cfg), 350e-6, 3, cfg);
  std::vector<CoilPose> extra;
  for (const auto& g : sw.sensors) extra.emplace_back(g);
  for (const auto& g : sw.relays) extra.emplace_back(g);
  const CouplingModel m(base, extra);
  double f = 749e6;
  for (auto _ : st) {
    benchmark::DoNotOptimize(m.antenna_matrix(f));
    f += 1e3;
  }
}
BENCHMARK(BM_AntennaMatrix41)->Unit(benchmark::kMicrosecond);

static void BM_ChainAnalysis(benchmark::State& st) {
  const auto nt = static_cast<Eigen::Index>(st.range(0));
  const Eigen::Index nr = 21;
  std::mt19937_64 rng(1);
  const Chain c{PartitionedImpedance(kJ * passive(2 * nt, rng).imag().cast<Complex>(), nt),
                PartitionedImpedance(passive(nt + nr, rng), nt),
                PartitionedImpedance(kJ * passive(2 * nr, rng).imag().cast<Complex>(), nr), 50.0};
  for (auto _ : st) benchmark::DoNotOptimize(analyze_chain(c).d);
}
BENCHMARK(BM_ChainAnalysis)->Arg(1)->Arg(5)->Unit(benchmark::kMicrosecond);

static void BM_Waterfill(benchmark::State& st) {
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> ex;
  RealVector g(st.range(0));
  for (auto& x : g) x = 1e6 * ex(rng);
  for (auto _ : st) benchmark::DoNotOptimize(waterfill(g, 1e-6, 1e5).total_rate);
}
BENCHMARK(BM_Waterfill)->Arg(131)->Arg(1024);

static void BM_LogdetPerNode(benchmark::State& st) {
  const auto n = static_cast<Eigen::Index>(st.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  ComplexMatrix h(21, n);
  for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = Complex(g(rng), g(rng)) * 30.0;
  const auto b = node_power_matrices(passive(n, rng));
  const RealVector p = RealVector::Constant(n, 1e-3);
  for (auto _ : st) benchmark::DoNotOptimize(max_logdet_per_node(h, b, p).rate);
}
BENCHMARK(BM_LogdetPerNode)->Arg(2)->Arg(5)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
