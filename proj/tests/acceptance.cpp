// End-to-end acceptance run: one PASS/FAIL line per criterion. The Monte
// Carlo part takes tens of minutes on a single core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "kirchhoff.hpp"
#include "misim/channel.hpp"
#include "misim/coil_models.hpp"
#include "misim/coop.hpp"
#include "misim/coupling.hpp"
#include "misim/csv.hpp"
#include "misim/experiments.hpp"
#include "misim/linalg.hpp"
#include "misim/link.hpp"
#include "misim/lumped.hpp"
#include "misim/matching.hpp"
#include "misim/multiport.hpp"
#include "misim/system.hpp"
#include "random_systems.hpp"

using namespace misim;
using constants::pi;

namespace {

// tolerances
constexpr double kCoilTol = 0.15;
constexpr double kExternalQTol = 0.10;
constexpr double kRadiationTol = 1e-10;
constexpr double kThresholdLoUm = 120.0, kThresholdHiUm = 190.0;
constexpr double kRateLo = 1e6 / 3.0, kRateHi = 3e6;
constexpr double kDetrimentalLo = 0.25, kDetrimentalHi = 0.55;
constexpr double kCoopRatioLo = 2.0, kCoopRatioHi = 5.0;
constexpr double kElaborateBeatsSimple = 0.80;
constexpr int kRealizations = 500;
constexpr double kPowerTol = 1e-9;
constexpr double kSymmetryTol = 1e-9;
constexpr double kPassivityTol = 1e-12;
constexpr double kRelayTol = 1e-10;
constexpr double kIdealMatchTol = 1e-8;
constexpr double kLumpedMatchTol = 1e-6;
constexpr double kDetuneMin = 1e-2;
constexpr double kWaterfillKkt = 1e-9;
constexpr double kLogdetKkt = 1e-5;
constexpr double kBruteForceTol = 0.01;
constexpr double kNodePowerTol = 1e-9;
constexpr double kDipoleTol = 0.02;

struct Line {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Line& l, double seconds) {
  std::printf("[%s] criterion %2d  %-34s %s  (%.1f s)\n", l.pass ? "PASS" : "FAIL", id, name.c_str(),
              l.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!l.pass) ++failures;
}

void run(int id, const std::string& name, const std::function<Line()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Line l{false, ""};
  try {
    l = body();
  } catch (const std::exception& e) {
    l = {false, std::string("exception: ") + e.what()};
  }
  report(id, name, l, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

std::string f(const char* fmt, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

double rel(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

// ------------------------------------------------------------------ 1, 2

Line coil_parameters() {
  const double fd = 750e6;
  struct Ref {
    double size, r, l, q;
  };
  bool ok = true;
  std::ostringstream os;
  for (const Ref& ref : {Ref{150e-6, 0.52, 3e-9, 28.5}, Ref{350e-6, 0.48, 7.2e-9, 71.0}}) {
    const CoilCircuit c = coil_circuit(make_sensor_coil(ref.size), fd);
    const double q = quality_factor(c, fd);
    ok = ok && rel(c.ohmic_resistance, ref.r) <= kCoilTol && rel(c.inductance, ref.l) <= kCoilTol &&
         rel(q, ref.q) <= kCoilTol;
    os << ref.size * 1e6 << "um: R " << c.ohmic_resistance << " L " << c.inductance * 1e9 << "n Q " << q << "; ";
  }
  const CoilCircuit ext = coil_circuit(make_loop_coil(0.10, 3e-3), fd);
  const double qe = quality_factor(ext, fd);
  ok = ok && rel(qe, 266.0) <= kExternalQTol;
  os << "external Q " << qe;
  return {ok, os.str()};
}

Line radiation_resistance_form() {
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double fr = 1e8 * std::pow(30.0, (i % 10) / 9.0);
    const int nu = 1 + (i / 10) % 7;
    const double s = 1e-9 * std::pow(1e5, (i / 10) / 9.0);
    const double lambda = constants::c0 / fr;
    const double ref = 320.0 * std::pow(pi, 4) * std::pow(nu * s, 2) / std::pow(lambda, 4);
    worst = std::max(worst, rel(radiation_resistance(fr, nu, s), ref));
  }
  return {worst <= kRadiationTol, f("max rel err %.2e over 100 points", worst)};
}

// ------------------------------------------------------------------ 5

Line power_consistency() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 3);
  std::normal_distribution<double> g;
  double worst_x = 0.0, worst_y = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Chain c = oracle::random_chain(dim(rng), dim(rng), rng, t % 2 == 1);
    const ComplexMatrix h = build_channel_matrix(c);
    ComplexVector vg(c.n_tx());
    for (auto& v : vg) v = Complex(g(rng), g(rng));
    const oracle::KirchhoffSolution s = oracle::solve_chain(c, vg);
    // x from the generator currents: x = (Re Z_T^in)^1/2 i_G
    const ChainAnalysis an = analyze_chain(c);
    const ComplexMatrix re = 0.5 * (an.in.t + an.in.t.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(re);
    const ComplexVector x = es.operatorSqrt() * s.i_gen;
    worst_x = std::max(worst_x, rel(x.squaredNorm(), s.generator_power));
    worst_y = std::max(worst_y, rel((h * x).squaredNorm(), s.load_power));
  }
  return {worst_x <= kPowerTol && worst_y <= kPowerTol,
          f("||x||^2 err %.2e", worst_x) + f(", ||Hx||^2 err %.2e", worst_y)};
}

// ------------------------------------------------------------------ 7

Line relay_reduction() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(3, 6);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = size(rng);
    const Eigen::Index na = 1 + t % (n - 1);
    const Eigen::Index nr = n - na;
    const ComplexMatrix z = oracle::random_passive(n, rng, 20.0);
    ComplexMatrix term = ComplexMatrix::Zero(nr, nr);
    for (Eigen::Index i = 0; i < nr; ++i) term(i, i) = Complex(0.0, -30.0 * (1.0 + std::abs(g(rng))));
    const ComplexMatrix reduced = reduce_passive_relays(z, na, term);
    // direct: invert the terminated network, keep the active block of the
    // admittance, invert back
    ComplexMatrix full = z;
    full.bottomRightCorner(nr, nr) += term;
    const ComplexMatrix y = full.fullPivLu().inverse();
    const ComplexMatrix direct = y.topLeftCorner(na, na).fullPivLu().inverse();
    worst = std::max(worst, (reduced - direct).norm() / direct.norm());
  }
  return {worst <= kRelayTol, f("max rel err %.2e over 50 cases", worst)};
}

// ------------------------------------------------------------------ 8

Line matching_verification() {
  std::mt19937_64 rng(8);
  const double fd = 750e6, r = 50.0;
  const LnaNoiseParams lna;
  double worst_t = 0.0, worst_r = 0.0, worst_lumped = 0.0, min_detune = 1e300;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 1 + t % 3;
    const ComplexMatrix zin = oracle::random_passive(n, rng, 30.0);
    const PartitionedImpedance mt(evaluate_lumped(synthesize_power_match_multiport(zin, r, fd), fd), n);
    const ComplexMatrix zt_in =
        mt.front() - mt.front_back() * (mt.back() + zin).fullPivLu().solve(mt.back_front());
    worst_t = std::max(worst_t, (zt_in - r * ComplexMatrix::Identity(n, n)).norm() / r);

    const ComplexMatrix zout = oracle::random_passive(n, rng, 30.0);
    const ComplexMatrix m = evaluate_lumped(synthesize_noise_match_multiport(zout, lna, fd), fd);
    const PartitionedImpedance mr(m, n);  // [A, L]
    const ComplexMatrix zr_out =
        mr.back() - mr.back_front() * (mr.front() + zout).fullPivLu().solve(mr.front_back());
    worst_r = std::max(worst_r, (zr_out - lna.z_opt() * ComplexMatrix::Identity(n, n)).norm() / std::abs(lna.z_opt()));
  }
  // L networks on the coils used by the system hit their conjugate target
  std::vector<std::array<double, 3>> t_values;
  for (const CoilGeometry& coil : {make_sensor_coil(150e-6), make_sensor_coil(350e-6), make_loop_coil(0.1, 3e-3)}) {
    const Complex zc = coil_circuit(coil, fd).port_impedance();
    for (const Complex target : {Complex(r, 0.0), lna.z_opt()}) {
      const LumpedNetwork l = synthesize_L_network(zc, target, fd);
      t_values.push_back(T_start_from_L(l));
      const Complex seen = two_port_input_impedance(evaluate_lumped(l, fd), zc);
      worst_lumped = std::max(worst_lumped, std::abs(seen - std::conj(target)) / std::abs(target));
      const double f1 = 1.1 * fd;
      const Complex off = two_port_input_impedance(evaluate_lumped(l, f1), coil_circuit(coil, f1).port_impedance());
      min_detune = std::min(min_detune, std::abs(off - std::conj(target)) / std::abs(target));
    }
  }
  // T networks are synthesized from three reactances; their target is the
  // Z matrix [x1+x3, x3; x3, x2+x3] (times j) at the design frequency
  std::uniform_real_distribution<double> ux(-2000.0, 2000.0);
  for (int k = 0; k < 20; ++k) t_values.push_back({ux(rng), ux(rng), ux(rng)});
  for (const auto& x : t_values) {
    const LumpedNetwork tn = make_T_network(x[0], x[1], x[2], fd);
    Eigen::Matrix2cd want;
    want << Complex(0.0, x[0] + x[2]), Complex(0.0, x[2]), Complex(0.0, x[2]), Complex(0.0, x[1] + x[2]);
    const ComplexMatrix z = evaluate_lumped(tn, fd);
    worst_lumped = std::max(worst_lumped, (z - want).norm() / want.norm());
    const ComplexMatrix off = evaluate_lumped(tn, 1.1 * fd);
    min_detune = std::min(min_detune, (off - want).norm() / want.norm());
  }
  const bool ok = worst_t <= kIdealMatchTol && worst_r <= kIdealMatchTol && worst_lumped <= kLumpedMatchTol &&
                  min_detune >= kDetuneMin;
  return {ok, f("Z_T^in err %.1e", worst_t) + f(", Z_R^out err %.1e", worst_r) + f(", L/T err %.1e", worst_lumped) +
                  f(", min detuning at 1.1 f %.2f", min_detune)};
}

// ------------------------------------------------------------------ 9

Line waterfilling() {
  std::mt19937_64 rng(9);
  std::exponential_distribution<double> ex(1.0);
  std::uniform_int_distribution<int> bins(1, 64);
  double worst = 0.0;
  int flat_wins = 0;
  for (int t = 0; t < 1000; ++t) {
    RealVector g(bins(rng));
    for (auto& x : g) x = std::pow(10.0, 6.0 * ex(rng) - 1.0) * (t % 7 == 0 ? ex(rng) : 1.0);
    const double p = 1e-6 * std::pow(10.0, 4.0 * ex(rng));
    const RateResult w = waterfill(g, p, 1e5);
    const RealVector q = w.per_bin_power.col(0);
    double mu = 0.0;
    for (Eigen::Index k = 0; k < g.size(); ++k)
      if (q[k] > 0.0) mu = std::max(mu, q[k] + 1.0 / g[k]);
    double res = std::abs(q.sum() - p) / p;
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      res = std::max(res, std::max(0.0, -q[k]) / p);
      if (q[k] > 0.0) res = std::max(res, std::abs(q[k] + 1.0 / g[k] - mu) / mu);
      else res = std::max(res, std::max(0.0, mu - 1.0 / g[k]) / mu);
    }
    worst = std::max(worst, res);
    const RateResult fl = flat_allocation(g, std::vector<bool>(static_cast<std::size_t>(g.size()), true), p, 1e5);
    if (fl.total_rate > w.total_rate * (1.0 + 1e-12)) ++flat_wins;
  }
  return {worst < kWaterfillKkt && flat_wins == 0,
          f("max KKT residual %.2e", worst) + ", flat beat waterfilling " + std::to_string(flat_wins) + "x"};
}

// ------------------------------------------------------------------ 10

double logdet2(const ComplexMatrix& h, const ComplexMatrix& q) {
  const ComplexMatrix m = ComplexMatrix::Identity(h.rows(), h.rows()) + h * q * h.adjoint();
  return std::log2(std::abs(m.determinant()));
}

// Dense search over 2x2 Q = [a c; c* b], refined around the best point.
double brute_force_2x2(const ComplexMatrix& h, const std::vector<ComplexMatrix>& b, const RealVector& p) {
  auto feasible = [&](const ComplexMatrix& q) {
    for (std::size_t n = 0; n < 2; ++n)
      if ((q * b[n]).trace().real() > p[static_cast<Eigen::Index>(n)] * (1.0 + 1e-12)) return false;
    return true;
  };
  // sum of B_n is I, so tr Q <= sum P_n bounds a and b (single B_n may be indefinite)
  const double amax = p.sum(), bmax = p.sum();
  double best = 0.0;
  double ca = 0.5, cb = 0.5, crho = 0.5, cphi = 0.0;  // center in unit coordinates
  double span = 1.0;
  for (int level = 0; level < 6; ++level) {
    const int k = 24;
    double nb = best, na_ = ca, nb_ = cb, nr = crho, np = cphi;
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j)
        for (int m = 0; m <= k; ++m)
          for (int s = 0; s < k; ++s) {
            const double ua = std::clamp(ca + span * (i / double(k) - 0.5), 0.0, 1.0);
            const double ub = std::clamp(cb + span * (j / double(k) - 0.5), 0.0, 1.0);
            const double ur = std::clamp(crho + span * (m / double(k) - 0.5), 0.0, 1.0);
            const double up = cphi + span * 2.0 * pi * (s / double(k) - 0.5);
            const double a = ua * amax, bb = ub * bmax;
            const Complex c = ur * std::sqrt(a * bb) * std::polar(1.0, up);
            ComplexMatrix q(2, 2);
            q << a, c, std::conj(c), bb;
            if (!feasible(q)) continue;
            const double v = logdet2(h, q);
            if (v > nb) {
              nb = v;
              na_ = ua;
              nb_ = ub;
              nr = ur;
              np = up;
            }
          }
    best = nb;
    ca = na_;
    cb = nb_;
    crho = nr;
    cphi = np;
    span *= 0.25;
  }
  return best;
}

Line logdet_solver() {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  double worst_gap = 0.0, worst_brute = 0.0, worst_audit = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index nn = 2 + t % 3;
    ComplexMatrix h(nn == 2 ? 2 : 4, nn);
    for (Eigen::Index i = 0; i < h.size(); ++i) h.data()[i] = Complex(g(rng), g(rng)) * 20.0;
    const ComplexMatrix zt = oracle::random_passive(nn, rng, 10.0);
    const auto b = node_power_matrices(zt);
    RealVector p(nn);
    for (auto& x : p) x = 1e-3 * (0.5 + std::abs(g(rng)));
    LogDetOptions opts;
    opts.gap_tol = 1e-7;
    const LogDetResult r = max_logdet_per_node(h, b, p, opts);
    worst_gap = std::max(worst_gap, r.relative_gap);
    // per-node power from the generator currents must equal tr(Q B_n)
    const RealVector pg = per_generator_power(r.q, zt);
    for (Eigen::Index n = 0; n < nn; ++n) {
      const double trb = (r.q * b[static_cast<std::size_t>(n)]).trace().real();
      worst_audit = std::max(worst_audit, std::abs(pg[n] - trb) / p[n]);
      worst_audit = std::max(worst_audit, std::max(0.0, trb - p[n]) / p[n]);
    }
    if (nn == 2 && h.rows() == 2) worst_brute = std::max(worst_brute, rel(r.rate, brute_force_2x2(h, b, p)));
  }
  return {worst_gap < kLogdetKkt && worst_brute <= kBruteForceTol && worst_audit <= kNodePowerTol,
          f("max duality gap %.2e", worst_gap) + f(", brute-force diff %.2e", worst_brute) +
              f(", node power audit %.2e", worst_audit)};
}

// ------------------------------------------------------------------ 11

Line dipole_vs_integral() {
  const CoilGeometry a = make_sensor_coil(350e-6, 5, 1.5, Vec3::Zero(), Vec3(0.2, -0.1, 1.0).normalized());
  const Vec3 dir = Vec3(0.7, -0.4, 0.6).normalized();
  const Vec3 axis_b = Vec3(-0.5, 0.3, 0.8).normalized();
  const double diam = a.outer_diameter();
  double prev = 1e300, at10 = 0.0;
  bool mono = true;
  for (int i = 0; i < 20; ++i) {
    const double d = diam * (2.0 + i);
    const CoilGeometry b = make_sensor_coil(350e-6, 5, 1.5, d * dir, axis_b);
    const Complex zi = mutual_impedance_integral(CoilPose(a), CoilPose(b), 750e6, {32, 1024, 1e-9});
    const double err = std::abs(mutual_impedance_dipole(a, b, 750e6) - zi) / std::abs(zi);
    mono = mono && err < prev;
    prev = err;
    if (i == 8) at10 = err;
  }
  return {mono && at10 < kDipoleTol, f("error at 10 diameters %.2e", at10) + (mono ? ", monotone" : ", NOT monotone")};
}

// ------------------------------------------------------------------ 12

std::string slurp(const std::string& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Line determinism(const ArrayContext& ctx) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "misim_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto write_runs = [&](int jobs_n, const std::string& tag) {
    const CdfResult r = run_cdf(ctx, false, 3, jobs_n);
    std::vector<std::vector<double>> rows;
    for (const auto& x : cdf_table(r)) rows.push_back({x.rate, x.ecdf_simple, x.ecdf_elaborate});
    write_csv((dir / ("cdf_" + tag + ".csv")).string(), {"rate_bps", "ecdf_simple", "ecdf_elaborate"}, rows, true);
    const SpectrumResult s = run_spectrum(ctx, jobs_n);
    rows.clear();
    for (const auto& x : s.rows)
      rows.push_back({x.frequency, x.perfect_db, x.practical_sensor_db, x.practical_both_db});
    write_csv((dir / ("spectrum_" + tag + ".csv")).string(),
              {"f_hz", "gain_db_perfect_match", "gain_db_practical_sensor", "gain_db_practical_both"}, rows, true);
  };
  write_runs(1, "a");
  write_runs(2, "b");
  const bool same = slurp((dir / "cdf_a.csv").string()) == slurp((dir / "cdf_b.csv").string()) &&
                    slurp((dir / "spectrum_a.csv").string()) == slurp((dir / "spectrum_b.csv").string());
  fs::remove_all(dir);
  return {same, same ? "byte-identical CSVs across runs and thread counts" : "CSV bytes differ"};
}

}  // namespace

int main() {
  std::printf("acceptance run, %d worker thread(s)\n", jobs());
  run(1, "coil parameters", coil_parameters);
  run(2, "radiation resistance", radiation_resistance_form);
  run(5, "power consistency", power_consistency);
  run(7, "relay reduction", relay_reduction);
  run(8, "matching verification", matching_verification);
  run(9, "waterfilling", waterfilling);
  run(10, "cooperative log-det solver", logdet_solver);
  run(11, "dipole vs integral coupling", dipole_vs_integral);

  const auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  const ArrayContext ctx(cfg);
  std::printf("array context ready in %.1f s\n",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

  ZAudit audit;
  run(3, "coil-size sweep landmarks", [&] {
    const SweepResult s = run_coil_sweep(ctx, jobs());
    audit.merge(s.audit);
    const double th = s.threshold_size * 1e6;
    const bool ok = s.threshold_found && th >= kThresholdLoUm && th <= kThresholdHiUm &&
                    s.rate_at_check_max >= kRateLo && s.rate_at_check_max <= kRateHi;
    return Line{ok, f("threshold %.1f um", s.threshold_found ? th : -1.0) +
                        f(", rate at 275 um %.3g bit/s", s.rate_at_check_max)};
  });
  run(4, "swarm statistics", [&] {
    const CdfResult single = run_cdf(ctx, false, kRealizations, jobs());
    const CdfResult coop = run_cdf(ctx, true, kRealizations, jobs());
    audit.merge(single.audit);
    audit.merge(coop.audit);
    const double ratio = coop.median_elaborate / single.median_elaborate;
    const bool ok = single.detrimental_fraction >= kDetrimentalLo && single.detrimental_fraction <= kDetrimentalHi &&
                    ratio >= kCoopRatioLo && ratio <= kCoopRatioHi &&
                    coop.elaborate_beats_simple >= kElaborateBeatsSimple;
    return Line{ok, f("relays detrimental %.1f %%", 100.0 * single.detrimental_fraction) +
                        f(", coop/single median %.2f", ratio) +
                        f(", elaborate > simple %.1f %%", 100.0 * coop.elaborate_beats_simple) +
                        f(", failed realizations %.0f", single.failures + coop.failures)};
  });
  run(6, "reciprocity and passivity", [&] {
    const SpectrumResult s = run_spectrum(ctx, jobs());
    audit.merge(s.audit);
    return Line{audit.ok(kSymmetryTol, kPassivityTol),
                f("max symmetry err %.2e", audit.max_symmetry_error) +
                    f(", min Re eig / trace %.2e", audit.min_passivity_ratio) +
                    f(" over %.0f matrices", static_cast<double>(audit.matrices))};
  });
  run(12, "determinism", [&] { return determinism(ctx); });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
