#include "misim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "misim/channel.hpp"
#include "misim/coop.hpp"
#include "misim/linalg.hpp"

namespace misim {

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

namespace {

double db(double x) { return 10.0 * std::log10(std::max(x, 1e-300)); }

CoilGeometry reference_sensor(const Config& cfg, double size, const Vec3& axis) {
  return make_swarm_coil(cfg, size, sensor_anchor(cfg), axis);
}

// Z_A at every uplink bin, computed once per system.
std::vector<ComplexMatrix> grid_matrices(const LinkSystem& sys) {
  std::vector<ComplexMatrix> out;
  for (double f : sys.context().rate_grid()) out.push_back(sys.antenna_matrix(f));
  return out;
}

std::size_t design_bin(const ArrayContext& ctx) {
  const auto& g = ctx.rate_grid();
  const double fd = ctx.config().design_frequency;
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::abs(g[i] - fd) < std::abs(g[best] - fd)) best = i;
  return best;
}

}  // namespace

// ---------------------------------------------------------------- spectrum

SpectrumResult run_spectrum(const ArrayContext& ctx, int jobs) {
  const Config& cfg = ctx.config();
  const int n = cfg.spectrum.n_bins;
  SpectrumResult res;
  res.rows.resize(static_cast<std::size_t>(n));
  jobs = std::max(1, std::min(jobs, n));
  std::vector<ZAudit> audits(static_cast<std::size_t>(jobs));
  // one system per worker: the audit inside LinkSystem is not shared
  parallel_for(jobs, jobs, [&](int t) {
    const LinkSystem sys(ctx, {reference_sensor(cfg, cfg.sensor.size, Vec3::UnitZ())});
    const MatchingBank bank = sys.nominal_sensor_bank();
    const MatchingBank rx = ctx.receive_bank();
    for (int i = t; i < n; i += jobs) {
      const double f = n == 1 ? cfg.spectrum.f_lo
                              : cfg.spectrum.f_lo + (cfg.spectrum.f_hi - cfg.spectrum.f_lo) * i / (n - 1);
      const ComplexMatrix za = sys.antenna_matrix(f);
      SpectrumRow& row = res.rows[static_cast<std::size_t>(i)];
      row.frequency = f;
      row.perfect_db = db(sys.downlink_perfect_gain(f, za, cfg.matching.spectrum_alternating_iters));
      row.practical_sensor_db = db(sys.downlink_ideal_tx(f, za, bank).squaredNorm());
      row.practical_both_db = db(sys.uplink_channel(f, za, bank, rx).squaredNorm());
    }
    audits[static_cast<std::size_t>(t)] = sys.audit();
  });
  for (const auto& a : audits) res.audit.merge(a);
  const auto peak = std::max_element(res.rows.begin(), res.rows.end(), [](const auto& a, const auto& b) {
    return a.practical_both_db < b.practical_both_db;
  });
  res.peak_frequency = peak->frequency;
  res.peak_db = peak->practical_both_db;
  return res;
}

// ---------------------------------------------------------------- coil sweep

std::vector<Vec3> sweep_orientations(int n_fibonacci) {
  std::vector<Vec3> dirs = fibonacci_sphere(n_fibonacci);
  dirs.push_back(Vec3::UnitX());
  dirs.push_back(Vec3::UnitY());
  dirs.push_back(Vec3::UnitZ());
  return dirs;
}

namespace {

struct PoseResult {
  double pte = 0.0;
  double rate = 0.0;
};

PoseResult evaluate_pose(const ArrayContext& ctx, double size, const Vec3& axis, ZAudit& audit) {
  const Config& cfg = ctx.config();
  const LinkSystem sys(ctx, {reference_sensor(cfg, size, axis)});
  const MatchingBank bank = sys.nominal_sensor_bank();
  const MatchingBank rx = ctx.receive_bank();
  const auto& grid = ctx.rate_grid();
  const std::size_t k0 = design_bin(ctx);
  PoseResult out;
  RealVector gains = RealVector::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ComplexMatrix za = sys.antenna_matrix(grid[k]);
    if (k == k0) out.pte = sys.downlink_ideal_tx(grid[k], za, bank).squaredNorm();
    const UplinkBin bin = sys.uplink(grid[k], za, bank, rx);
    if (bin.valid) gains[static_cast<Eigen::Index>(k)] = whitened_mrc_gain(bin.h.col(0), bin.k);
  }
  const PowerBudget budget = make_power_budget(cfg.tx_power * out.pte, cfg.activation_power);
  if (!budget.in_outage) out.rate = waterfill(gains, budget.uplink_power, cfg.uplink.bin_width).total_rate;
  audit.merge(sys.audit());
  return out;
}

// y at x by linear interpolation of log y over x; linear in y when either end is 0.
double interp_log(double x0, double y0, double x1, double y1, double x) {
  const double t = (x - x0) / (x1 - x0);
  if (y0 > 0.0 && y1 > 0.0) return std::exp(std::log(y0) + t * (std::log(y1) - std::log(y0)));
  return y0 + t * (y1 - y0);
}

}  // namespace

SweepResult run_coil_sweep(const ArrayContext& ctx, int jobs) {
  const Config& cfg = ctx.config();
  const SweepConfig& sc = cfg.sweep;
  const std::vector<Vec3> dirs = sweep_orientations(sc.n_orientations);
  const int nd = static_cast<int>(dirs.size());
  const int ns = sc.n_sizes;
  std::vector<double> sizes(static_cast<std::size_t>(ns));
  for (int i = 0; i < ns; ++i)
    sizes[static_cast<std::size_t>(i)] =
        ns == 1 ? sc.size_min : sc.size_min * std::pow(sc.size_max / sc.size_min, static_cast<double>(i) / (ns - 1));

  std::vector<PoseResult> grid(static_cast<std::size_t>(ns * nd));
  std::vector<ZAudit> audits(grid.size());
  parallel_for(ns * nd, jobs, [&](int i) {
    const auto u = static_cast<std::size_t>(i);
    grid[u] = evaluate_pose(ctx, sizes[u / dirs.size()], dirs[u % dirs.size()], audits[u]);
  });

  SweepResult res;
  res.orientations = nd;
  for (const auto& a : audits) res.audit.merge(a);
  std::vector<double> pr_max;
  for (int s = 0; s < ns; ++s) {
    SweepRow row;
    row.size = sizes[static_cast<std::size_t>(s)];
    double pmin = 1e300, pmax = 0.0, rmin = 1e300, rmax = 0.0;
    for (int d = 0; d < nd; ++d) {
      const PoseResult& p = grid[static_cast<std::size_t>(s * nd + d)];
      pmin = std::min(pmin, p.pte);
      pmax = std::max(pmax, p.pte);
      rmin = std::min(rmin, p.rate);
      rmax = std::max(rmax, p.rate);
    }
    row.pte_db_min = db(pmin);
    row.pte_db_max = db(pmax);
    row.rate_min = rmin;
    row.rate_max = rmax;
    res.rows.push_back(row);
    pr_max.push_back(cfg.tx_power * pmax);
  }

  const double p0 = cfg.activation_power;
  for (int s = 0; s < ns; ++s) {
    if (pr_max[static_cast<std::size_t>(s)] < p0) continue;
    res.threshold_found = true;
    if (s == 0) {
      res.threshold_size = sizes[0];
    } else {
      const double l0 = std::log(pr_max[static_cast<std::size_t>(s - 1)]);
      const double l1 = std::log(pr_max[static_cast<std::size_t>(s)]);
      const double t = (std::log(p0) - l0) / (l1 - l0);
      res.threshold_size = sizes[static_cast<std::size_t>(s - 1)] *
                           std::pow(sizes[static_cast<std::size_t>(s)] / sizes[static_cast<std::size_t>(s - 1)], t);
    }
    break;
  }

  const double xc = sc.rate_check_size;
  for (int s = 0; s + 1 < ns; ++s) {
    const auto& a = res.rows[static_cast<std::size_t>(s)];
    const auto& b = res.rows[static_cast<std::size_t>(s + 1)];
    if (xc < a.size || xc > b.size) continue;
    res.rate_at_check_max = interp_log(a.size, a.rate_max, b.size, b.rate_max, xc);
    res.rate_at_check_min = interp_log(a.size, a.rate_min, b.size, b.rate_min, xc);
    break;
  }
  return res;
}

// ---------------------------------------------------------------- schemes

SchemeOutcome evaluate_single(const LinkSystem& sys, Scheme scheme) {
  const ArrayContext& ctx = sys.context();
  const Config& cfg = ctx.config();
  const auto& grid = ctx.rate_grid();
  const std::vector<ComplexMatrix> zas = grid_matrices(sys);
  const MatchingBank bank = scheme == Scheme::Simple ? sys.nominal_sensor_bank() : sys.rematched_sensor_bank();
  const MatchingBank rx = ctx.receive_bank();

  SchemeOutcome out;
  std::size_t kd = design_bin(ctx);
  double pte = 0.0;
  if (scheme == Scheme::Simple) {
    pte = sys.downlink_ideal_tx(grid[kd], zas[kd], bank).row(0).squaredNorm();
  } else {
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double g = sys.downlink_ideal_tx(grid[k], zas[k], bank).row(0).squaredNorm();
      if (g > pte) {
        pte = g;
        kd = k;
      }
    }
  }
  out.downlink_frequency = grid[kd];
  out.received_power = cfg.tx_power * pte;
  const PowerBudget budget = make_power_budget(out.received_power, cfg.activation_power);
  out.outage = budget.in_outage;
  out.active_sensors = out.outage ? 0 : 1;
  if (out.outage) return out;

  const std::vector<bool> mask = ctx.band3_mask();
  RealVector gains = RealVector::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (scheme == Scheme::Simple && !mask[k]) continue;
    const UplinkBin bin = sys.uplink(grid[k], zas[k], bank, rx);
    if (!bin.valid) {
      out.warnings.push_back("bin " + std::to_string(grid[k]) + " Hz dropped: " + bin.error);
      continue;
    }
    gains[static_cast<Eigen::Index>(k)] = whitened_mrc_gain(bin.h.col(0), bin.k);
  }
  const RateResult r = scheme == Scheme::Simple
                           ? flat_allocation(gains, mask, budget.uplink_power, cfg.uplink.bin_width)
                           : waterfill(gains, budget.uplink_power, cfg.uplink.bin_width);
  out.rate = r.total_rate;
  out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  return out;
}

SchemeOutcome evaluate_coop(const LinkSystem& sys, Scheme scheme) {
  const ArrayContext& ctx = sys.context();
  const Config& cfg = ctx.config();
  const auto& grid = ctx.rate_grid();
  const auto ns = static_cast<Eigen::Index>(sys.n_sensors());
  const std::vector<ComplexMatrix> zas = grid_matrices(sys);
  const MatchingBank bank = scheme == Scheme::Simple ? sys.nominal_sensor_bank() : sys.rematched_sensor_bank();
  const MatchingBank rx = ctx.receive_bank();

  // received power of every sensor under the target-constrained beamformer
  auto downlink = [&](std::size_t k, RealVector& pr) {
    const ComplexMatrix h = sys.downlink_ideal_tx(grid[k], zas[k], bank);
    const DownlinkBeam beam = coop_downlink_beamform(h, cfg.tx_power, cfg.activation_power, 0);
    pr = cfg.tx_power * (h * beam.beamformer).cwiseAbs2();
    double total = 0.0;
    for (Eigen::Index n = 0; n < ns; ++n) total += make_power_budget(pr[n], cfg.activation_power).uplink_power;
    return pr[0] > cfg.activation_power ? total : -1.0;
  };

  SchemeOutcome out;
  std::size_t kd = design_bin(ctx);
  RealVector pr;
  if (scheme == Scheme::Simple) {
    downlink(kd, pr);
  } else {
    double best = -2.0;
    RealVector cand;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double v = downlink(k, cand);
      if (v > best) {
        best = v;
        kd = k;
        pr = cand;
      }
    }
  }
  out.downlink_frequency = grid[kd];
  out.received_power = pr[0];
  out.outage = !(pr[0] > cfg.activation_power);
  if (out.outage) return out;

  std::vector<Eigen::Index> active;
  std::vector<double> budgets;
  for (Eigen::Index n = 0; n < ns; ++n) {
    const PowerBudget b = make_power_budget(pr[n], cfg.activation_power);
    if (b.in_outage) continue;
    active.push_back(n);
    budgets.push_back(b.uplink_power);
  }
  out.active_sensors = static_cast<int>(active.size());
  const auto na = static_cast<Eigen::Index>(active.size());

  const std::vector<bool> mask = ctx.band3_mask();
  std::vector<CoopUplinkBin> bins;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (scheme == Scheme::Simple && !mask[k]) continue;
    const UplinkBin bin = sys.uplink(grid[k], zas[k], bank, rx);
    if (!bin.valid) {
      out.warnings.push_back("bin " + std::to_string(grid[k]) + " Hz dropped: " + bin.error);
      continue;
    }
    CoopUplinkBin cb;
    const ComplexMatrix hw = whiten(bin.h, bin.k);
    cb.h_white.resize(hw.rows(), na);
    cb.z_t_in.resize(na, na);
    for (Eigen::Index a = 0; a < na; ++a) {
      cb.h_white.col(a) = hw.col(active[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < na; ++b)
        cb.z_t_in(a, b) = bin.z_t_in(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]);
    }
    bins.push_back(std::move(cb));
  }
  if (bins.empty()) {
    out.warnings.push_back("no usable uplink bin");
    return out;
  }
  const RealVector bv = Eigen::Map<const RealVector>(budgets.data(), na);
  const RateResult r = coop_uplink_rate(bins, bv, cfg.uplink.bin_width, scheme == Scheme::Elaborate, cfg.logdet);
  out.rate = r.total_rate;
  out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  return out;
}

// ---------------------------------------------------------------- Monte Carlo

CdfResult run_cdf(const ArrayContext& ctx, bool cooperative, int n, int jobs) {
  const Config& cfg = ctx.config();
  const SwarmConfig& sc = cooperative ? cfg.monte_carlo.coop : cfg.monte_carlo.relay;
  CdfResult res;
  res.cooperative = cooperative;
  res.runs.resize(static_cast<std::size_t>(n));
  std::vector<ZAudit> audits(res.runs.size());
  const auto eval = cooperative ? evaluate_coop : evaluate_single;
  const std::uint64_t stream = cooperative ? 0x636f6f70ULL : 0x72656c61ULL;
  parallel_for(n, jobs, [&](int i) {
    Realization& r = res.runs[static_cast<std::size_t>(i)];
    r.seed = child_seed(child_seed(cfg.seed, stream), static_cast<std::uint64_t>(i));
    try {
      const Swarm sw = sample_swarm(sc.n_relays, sc.n_sensors, sensor_anchor(cfg), cfg.sensor.size, r.seed, cfg);
      const LinkSystem with(ctx, sw.sensors, sw.relays);
      r.simple = eval(with, Scheme::Simple);
      r.elaborate = eval(with, Scheme::Elaborate);
      const LinkSystem without(ctx, sw.sensors);
      r.reference = eval(without, Scheme::Elaborate);
      audits[static_cast<std::size_t>(i)].merge(with.audit());
      audits[static_cast<std::size_t>(i)].merge(without.audit());
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
  });
  for (const auto& a : audits) res.audit.merge(a);

  std::vector<double> s, e, ref;
  int detrimental = 0, better = 0;
  for (const auto& r : res.runs) {
    if (!r.ok) {
      ++res.failures;
      continue;
    }
    s.push_back(r.simple.rate);
    e.push_back(r.elaborate.rate);
    ref.push_back(r.reference.rate);
    if (r.elaborate.rate < r.reference.rate) ++detrimental;
    if (r.elaborate.rate > r.simple.rate) ++better;
  }
  res.median_simple = median(s);
  res.median_elaborate = median(e);
  res.median_reference = median(ref);
  if (!e.empty()) {
    res.detrimental_fraction = static_cast<double>(detrimental) / static_cast<double>(e.size());
    res.elaborate_beats_simple = static_cast<double>(better) / static_cast<double>(e.size());
  }
  return res;
}

std::vector<CdfRow> cdf_table(const CdfResult& r) {
  std::vector<double> s, e, all;
  for (const auto& x : r.runs) {
    if (!x.ok) continue;
    s.push_back(x.simple.rate);
    e.push_back(x.elaborate.rate);
  }
  std::sort(s.begin(), s.end());
  std::sort(e.begin(), e.end());
  all = s;
  all.insert(all.end(), e.begin(), e.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto ecdf = [](const std::vector<double>& v, double x) {
    if (v.empty()) return 0.0;
    return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin()) / static_cast<double>(v.size());
  };
  std::vector<CdfRow> rows;
  for (double x : all) rows.push_back({x, ecdf(s, x), ecdf(e, x)});
  return rows;
}

// ---------------------------------------------------------------- validation

namespace {

ComplexMatrix random_passive(Eigen::Index n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g;
  RealMatrix a(n, n), b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = g(rng);
      b(i, j) = g(rng);
    }
  const RealMatrix re = a * a.transpose() / static_cast<double>(n) + 0.1 * RealMatrix::Identity(n, n);
  const RealMatrix im = 0.5 * (b + b.transpose());
  return scale * (re.cast<Complex>() + kJ * im.cast<Complex>());
}

ComplexMatrix random_lossless(Eigen::Index n, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> g;
  RealMatrix b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = g(rng);
  return scale * kJ * (0.5 * (b + b.transpose())).cast<Complex>();
}

// Loop-current solve of the whole chain: one loop per generator, one per
// interconnection and one per load. Returns the load voltages for v_gen and
// the generator-side active power.
std::pair<ComplexVector, double> loop_solve(const Chain& c, const ComplexVector& vg) {
  const Eigen::Index nt = c.n_tx(), nr = c.n_rx();
  const double r = c.reference_ohms;
  const Eigen::Index np = 2 * nt + (nt + nr) + 2 * nr;  // all ports
  ComplexMatrix z = ComplexMatrix::Zero(np, np);
  z.block(0, 0, 2 * nt, 2 * nt) = c.zt.matrix();
  z.block(2 * nt, 2 * nt, nt + nr, nt + nr) = c.za.matrix();
  z.block(3 * nt + nr, 3 * nt + nr, 2 * nr, 2 * nr) = c.zr.matrix();
  const Eigen::Index nl = nt + nt + nr + nr;  // loops
  ComplexMatrix m = ComplexMatrix::Zero(np, nl);
  ComplexMatrix term = ComplexMatrix::Zero(nl, nl);
  ComplexVector e = ComplexVector::Zero(nl);
  Eigen::Index l = 0;
  for (Eigen::Index g = 0; g < nt; ++g, ++l) {
    m(g, l) = 1.0;
    term(l, l) = r;
    e[l] = vg[g];
  }
  for (Eigen::Index p = 0; p < nt; ++p, ++l) {
    m(nt + p, l) = 1.0;
    m(2 * nt + p, l) = -1.0;
  }
  for (Eigen::Index p = 0; p < nr; ++p, ++l) {
    m(3 * nt + p, l) = 1.0;
    m(3 * nt + nr + p, l) = -1.0;
  }
  for (Eigen::Index q = 0; q < nr; ++q, ++l) {
    m(3 * nt + 2 * nr + q, l) = 1.0;
    term(l, l) = r;
  }
  const ComplexVector j = (m.transpose() * z * m + term).partialPivLu().solve(e);
  const ComplexVector ig = j.head(nt);
  const ComplexVector vport = vg - r * ig;
  return {-r * j.tail(nr), vport.dot(ig).real()};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

std::vector<CheckResult> run_validation(const Config& cfg) {
  const ValidateConfig& vc = cfg.validate;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> dim(1, 4);
  std::vector<CheckResult> out;

  {  // transfer matrix and power against a loop-current solve
    double worst_d = 0.0, worst_p = 0.0;
    for (int t = 0; t < vc.random_systems; ++t) {
      const Eigen::Index nt = dim(rng), nr = dim(rng);
      const Chain c{PartitionedImpedance(random_lossless(2 * nt, rng, 50.0), nt),
                    PartitionedImpedance(random_passive(nt + nr, rng, 20.0), nt),
                    PartitionedImpedance(random_lossless(2 * nr, rng, 50.0), nr), 50.0};
      const ChainAnalysis an = analyze_chain(c);
      ComplexMatrix loop_d(nr, nt);
      for (Eigen::Index g = 0; g < nt; ++g) loop_d.col(g) = loop_solve(c, ComplexVector::Unit(nt, g)).first;
      worst_d = std::max(worst_d, (loop_d - an.d).norm() / std::max(loop_d.norm(), 1e-300));
      ComplexVector vg(nt);
      for (Eigen::Index g = 0; g < nt; ++g) vg[g] = Complex(std::normal_distribution<double>()(rng), 1.0);
      const double p_loop = loop_solve(c, vg).second;
      const ComplexVector ig = linalg::solve(an.in.t + 50.0 * ComplexMatrix::Identity(nt, nt), vg, "check");
      const double p_chain = ig.dot(an.in.t * ig).real();
      worst_p = std::max(worst_p, std::abs(p_loop - p_chain) / std::abs(p_loop));
    }
    out.push_back({"chain_vs_loop_solve", worst_d <= vc.power_tol && worst_p <= vc.power_tol,
                   "max rel err D " + fmt(worst_d) + ", power " + fmt(worst_p)});
  }

  {  // Z_A reciprocity and passivity on sampled swarms
    const std::vector<CoilPose> array = build_external_array(cfg.array);
    CouplingOptions opts = cfg.coupling;
    opts.band_lo_hz = cfg.spectrum.f_lo;
    opts.band_hi_hz = cfg.spectrum.f_hi;
    const CouplingModel base(array, opts);
    ZAudit audit;
    const int swarms = std::max(1, std::min(vc.random_systems / 20, 5));
    for (int s = 0; s < swarms; ++s) {
      const Swarm sw = sample_swarm(4, 1, sensor_anchor(cfg), cfg.sensor.size, child_seed(cfg.seed, 1000 + s), cfg);
      std::vector<CoilPose> extra;
      for (const auto& g : sw.sensors) extra.emplace_back(g);
      for (const auto& g : sw.relays) extra.emplace_back(g);
      const CouplingModel model(base, extra);
      for (double f : {cfg.spectrum.f_lo, cfg.design_frequency, cfg.spectrum.f_hi}) {
        const ComplexMatrix z = model.antenna_matrix(f);
        audit.record(z);
        const auto na = static_cast<Eigen::Index>(array.size() + 1);
        const auto nrl = z.rows() - na;
        ComplexMatrix term = ComplexMatrix::Zero(nrl, nrl);
        for (Eigen::Index i = 0; i < nrl; ++i)
          term(i, i) = 1.0 / (kJ * angular(f) * relay_capacitance(sw.relays[static_cast<std::size_t>(i)], cfg.design_frequency));
        audit.record(reduce_passive_relays(z, na, term));
      }
    }
    out.push_back({"antenna_reciprocity_passivity", audit.ok(vc.symmetry_tol, vc.passivity_tol),
                   "max symmetry err " + fmt(audit.max_symmetry_error) + ", min passivity ratio " +
                       fmt(audit.min_passivity_ratio) + " over " + std::to_string(audit.matrices) + " matrices"});
  }

  {  // ideal power match presents R at every generator
    double worst = 0.0;
    for (int t = 0; t < vc.random_systems; ++t) {
      const Eigen::Index n = dim(rng);
      const ComplexMatrix zin = random_passive(n, rng, 30.0);
      const double f = cfg.design_frequency;
      const ComplexMatrix m = evaluate_lumped(synthesize_power_match_multiport(zin, cfg.reference_ohms, f), f);
      const PartitionedImpedance p(m, n);
      const ComplexMatrix seen = p.front() - p.front_back() * linalg::solve(p.back() + zin, p.back_front(), "match");
      worst = std::max(worst, (seen - cfg.reference_ohms * ComplexMatrix::Identity(n, n)).norm() / cfg.reference_ohms);
    }
    out.push_back({"ideal_power_match", worst <= vc.match_tol, "max rel err " + fmt(worst)});
  }

  {  // waterfilling KKT conditions
    double worst = 0.0;
    std::exponential_distribution<double> ex(1.0);
    for (int t = 0; t < vc.random_systems; ++t) {
      RealVector g(16);
      for (auto& x : g) x = ex(rng) * 1e3;
      const double p = 1e-3 * (1.0 + ex(rng));
      const RateResult r = waterfill(g, p, 1.0);
      const RealVector q = r.per_bin_power.col(0);
      double level = 0.0;
      for (Eigen::Index k = 0; k < g.size(); ++k)
        if (q[k] > 0.0) level = std::max(level, q[k] + 1.0 / g[k]);
      double err = std::abs(q.sum() - p) / p;
      for (Eigen::Index k = 0; k < g.size(); ++k) {
        if (q[k] < -vc.kkt_tol * p) err = std::max(err, -q[k] / p);
        if (q[k] > 0.0) err = std::max(err, std::abs(q[k] + 1.0 / g[k] - level) / level);
        else err = std::max(err, std::max(0.0, level - 1.0 / g[k]) / level);
      }
      worst = std::max(worst, err);
    }
    out.push_back({"waterfill_kkt", worst <= vc.kkt_tol, "max rel residual " + fmt(worst)});
  }

  {  // per-node log-det: feasibility and duality gap
    double worst_gap = 0.0, worst_feas = 0.0;
    const int n_sys = std::max(1, vc.random_systems / 10);
    for (int t = 0; t < n_sys; ++t) {
      const Eigen::Index n = 2 + t % 3;
      ComplexMatrix h(21, n);
      std::normal_distribution<double> g;
      for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = Complex(g(rng), g(rng)) * 30.0;
      const ComplexMatrix zt = random_passive(n, rng, 10.0);
      const auto b = node_power_matrices(zt);
      RealVector budgets(n);
      for (auto& x : budgets) x = 1e-3 * (0.5 + std::exponential_distribution<double>()(rng));
      const LogDetResult r = max_logdet_per_node(h, b, budgets, cfg.logdet);
      worst_gap = std::max(worst_gap, r.relative_gap);
      for (Eigen::Index k = 0; k < n; ++k)
        worst_feas = std::max(worst_feas, ((r.q * b[static_cast<std::size_t>(k)]).trace().real() - budgets[k]) / budgets[k]);
    }
    out.push_back({"logdet_gap_and_budgets", worst_gap <= cfg.logdet.gap_tol && worst_feas <= 1e-6,
                   "max gap " + fmt(worst_gap) + ", max budget excess " + fmt(worst_feas)});
  }

  {  // config round trip
    const bool same = config_hash(config_from_json(config_to_json(cfg))) == config_hash(cfg);
    out.push_back({"config_round_trip", same, same ? "hash stable" : "hash changed"});
  }
  return out;
}

}  // namespace misim
