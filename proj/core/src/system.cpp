#include "misim/system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "misim/channel.hpp"
#include "misim/coil_models.hpp"
#include "misim/link.hpp"
#include "misim/linalg.hpp"

namespace misim {

void ZAudit::record(const ComplexMatrix& z) {
  max_symmetry_error = std::max(max_symmetry_error, linalg::symmetry_error(z));
  min_passivity_ratio = std::min(min_passivity_ratio, linalg::min_real_part_eigenvalue_ratio(z));
  ++matrices;
}

void ZAudit::merge(const ZAudit& o) {
  max_symmetry_error = std::max(max_symmetry_error, o.max_symmetry_error);
  min_passivity_ratio = std::min(min_passivity_ratio, o.min_passivity_ratio);
  matrices += o.matrices;
}

bool ZAudit::ok(double symmetry_tol, double passivity_tol) const {
  return max_symmetry_error <= symmetry_tol && min_passivity_ratio >= -passivity_tol;
}

double coil_transducer_gain(const Eigen::Matrix2cd& z, Complex z_coil, double r) {
  const Complex i2 = 1.0 / (z(1, 1) + z_coil - z(1, 0) * z(0, 1) / (z(0, 0) + r));
  return std::norm(r * z(0, 1) * i2 / (z(0, 0) + r));
}

// ---------------------------------------------------------------- array

ArrayContext::ArrayContext(const Config& cfg, const std::array<double, 3>* t_reactances) : cfg_(cfg) {
  cfg_.check();
  coils_ = build_external_array(cfg_.array);
  CouplingOptions opts = cfg_.coupling;
  const double fd = cfg_.design_frequency;
  opts.band_lo_hz = std::min(cfg_.spectrum.f_lo, 0.9 * fd);
  opts.band_hi_hz = std::max(cfg_.spectrum.f_hi, 1.1 * fd);
  coupling_ = std::make_unique<CouplingModel>(coils_, opts);
  design_t(t_reactances);
  find_band();
}

MatchingBank ArrayContext::receive_bank() const {
  MatchingBank b;
  b.networks.assign(coils_.size(), t_design_.network);
  return b;
}

std::vector<bool> ArrayContext::band3_mask() const {
  std::vector<bool> m(rate_grid_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rate_grid_[i] >= band3_lo_ && rate_grid_[i] <= band3_hi_;
  return m;
}

void ArrayContext::design_t(const std::array<double, 3>* given) {
  const double f = cfg_.design_frequency;
  const Complex z_coil = coil_circuit(coils_[0].geometry(), f).port_impedance();
  const LumpedNetwork l = synthesize_L_network(z_coil, std::conj(cfg_.noise.lna.z_opt()), f);
  t_design_.start = T_start_from_L(l);
  if (given) {
    t_design_.network = make_T_network((*given)[0], (*given)[1], (*given)[2], f);
  } else {
    t_design_.network = make_T_network(t_design_.start[0], t_design_.start[1], t_design_.start[2], f);
  }

  // reference sensor below the array center along x, y and z
  struct Probe {
    std::unique_ptr<LinkSystem> sys;
    ComplexMatrix za;
    MatchingBank bank;
  };
  std::vector<Probe> probes;
  for (const Vec3& axis : {Vec3::UnitX().eval(), Vec3::UnitY().eval(), Vec3::UnitZ().eval()}) {
    Probe p;
    p.sys = std::make_unique<LinkSystem>(*this, std::vector<CoilGeometry>{
                                                    make_swarm_coil(cfg_, cfg_.sensor.size, sensor_anchor(cfg_), axis)});
    p.za = p.sys->antenna_matrix(f);
    p.bank = p.sys->nominal_sensor_bank();
    probes.push_back(std::move(p));
  }
  auto objective = [&](const std::vector<double>& x) {
    try {
      MatchingBank rx;
      rx.networks.assign(coils_.size(), make_T_network(x[0], x[1], x[2], f));
      double acc = 0.0;
      for (const auto& p : probes) {
        const UplinkBin bin = p.sys->uplink(f, p.za, p.bank, rx);
        if (!bin.valid) return -1e6;
        acc += 10.0 * std::log10(whitened_mrc_gain(bin.h.col(0), bin.k));
      }
      return acc / static_cast<double>(probes.size());
    } catch (const std::exception&) {
      return -1e6;
    }
  };
  const auto& x0 = given ? *given : t_design_.start;
  const std::vector<double> xv(x0.begin(), x0.end());
  t_design_.initial_objective_db = objective(xv);
  if (given) {
    t_design_.objective_db = t_design_.initial_objective_db;
    return;
  }
  const ReactanceSearchResult res = maximize_over_reactances(objective, xv, cfg_.matching.t_search);
  t_design_.network = make_T_network(res.reactances[0], res.reactances[1], res.reactances[2], f);
  t_design_.objective_db = res.objective;
  t_design_.improved = res.improved;
  t_design_.evaluations = res.evaluations;
}

void ArrayContext::find_band() {
  const double fd = cfg_.design_frequency;
  const double r = cfg_.reference_ohms;
  const CoilGeometry& g = coils_[0].geometry();
  auto gain = [&](double f) {
    return coil_transducer_gain(evaluate_lumped(t_design_.network, f), coil_circuit(g, f).port_impedance(), r);
  };
  const int n = 8001;
  const double lo = 0.8 * fd, hi = 1.2 * fd;
  std::vector<double> fs(n), gs(n);
  int peak = 0;
  for (int i = 0; i < n; ++i) {
    fs[i] = lo + (hi - lo) * i / (n - 1);
    gs[i] = gain(fs[i]);
    if (gs[i] > gs[peak]) peak = i;
  }
  const double half = 0.5 * gs[peak];
  auto cross = [&](int i, int j) {  // gs[i] >= half > gs[j]
    return fs[i] + (fs[j] - fs[i]) * (gs[i] - half) / (gs[i] - gs[j]);
  };
  int a = peak;
  while (a > 0 && gs[a - 1] >= half) --a;
  int b = peak;
  while (b < n - 1 && gs[b + 1] >= half) ++b;
  if (a == 0 || b == n - 1) throw NumericalError("array 3 dB band: gain does not drop by 3 dB within +-20 %");
  band3_lo_ = cross(a, a - 1);
  band3_hi_ = cross(b, b + 1);

  const double w = cfg_.uplink.bin_width;
  double halfwidth = cfg_.uplink.band_halfwidth_3db * (band3_hi_ - band3_lo_);
  halfwidth = std::max({halfwidth, fd - band3_lo_, band3_hi_ - fd});
  const int nh = static_cast<int>(std::ceil(halfwidth / w - 1e-9));
  rate_grid_.clear();
  for (int i = -nh; i <= nh; ++i) rate_grid_.push_back(fd + i * w);
}

// ---------------------------------------------------------------- link

LinkSystem::LinkSystem(const ArrayContext& ctx, const std::vector<CoilGeometry>& sensors,
                       const std::vector<CoilGeometry>& relays)
    : ctx_(ctx), n_sensors_(sensors.size()), sensor_geoms_(sensors) {
  if (sensors.empty()) throw DomainError("LinkSystem: need at least one sensor");
  std::vector<CoilPose> extra;
  for (const auto& s : sensors) extra.emplace_back(s);
  for (const auto& r : relays) {
    extra.emplace_back(r);
    relay_caps_.push_back(misim::relay_capacitance(r, ctx.config().design_frequency));
  }
  for (std::size_t i = 0; i < extra.size(); ++i) {
    for (const auto& a : ctx.coils())
      if (cylinders_collide(a.geometry(), extra[i].geometry(), 0.0))
        throw DomainError("LinkSystem: in-body coil intersects the external array");
    for (std::size_t j = i + 1; j < extra.size(); ++j)
      if (cylinders_collide(extra[i].geometry(), extra[j].geometry(), 0.0))
        throw DomainError("LinkSystem: in-body coils intersect");
  }
  model_ = std::make_unique<CouplingModel>(ctx.coupling(), extra);
}

ComplexMatrix LinkSystem::antenna_matrix(double f) const {
  const ComplexMatrix full = model_->antenna_matrix(f);
  audit_.record(full);
  if (relay_caps_.empty()) return full;
  const auto n_active = static_cast<Eigen::Index>(ctx_.size() + n_sensors_);
  const auto nr = static_cast<Eigen::Index>(relay_caps_.size());
  ComplexMatrix term = ComplexMatrix::Zero(nr, nr);
  for (Eigen::Index i = 0; i < nr; ++i) term(i, i) = 1.0 / (kJ * angular(f) * relay_caps_[static_cast<std::size_t>(i)]);
  ComplexMatrix za = reduce_passive_relays(full, n_active, term);
  audit_.record(za);
  return za;
}

MatchingBank LinkSystem::nominal_sensor_bank() const {
  const double fd = ctx_.config().design_frequency;
  MatchingBank b;
  for (const auto& g : sensor_geoms_)
    b.networks.push_back(synthesize_L_network(coil_circuit(g, fd).port_impedance(), ctx_.config().reference_ohms, fd));
  return b;
}

MatchingBank LinkSystem::rematched_sensor_bank() const {
  const double fd = ctx_.config().design_frequency;
  const ComplexMatrix za = antenna_matrix(fd);
  const auto nt = static_cast<Eigen::Index>(ctx_.size());
  MatchingBank b;
  for (std::size_t n = 0; n < n_sensors_; ++n) {
    const auto i = nt + static_cast<Eigen::Index>(n);
    b.networks.push_back(synthesize_L_network(za(i, i), ctx_.config().reference_ohms, fd));
  }
  return b;
}

ComplexMatrix LinkSystem::downlink_ideal_tx(double f, const ComplexMatrix& za, const MatchingBank& sensor_bank) const {
  const auto nt = static_cast<Eigen::Index>(ctx_.size());
  const auto ns = static_cast<Eigen::Index>(n_sensors_);
  const double r = ctx_.config().reference_ohms;
  Chain chain{through_bank(nt).transmit(f, nt), PartitionedImpedance(za, nt), sensor_bank.receive(f, ns), r};
  const ComplexMatrix z_in = input_impedances(chain).a;
  chain.zt = PartitionedImpedance(evaluate_lumped(synthesize_power_match_multiport(z_in, r, f), f), nt);
  return build_channel_matrix(chain);
}

Chain LinkSystem::uplink_chain(double f, const ComplexMatrix& za, const MatchingBank& sensor_bank,
                               const MatchingBank& array_bank) const {
  const auto nt = static_cast<Eigen::Index>(ctx_.size());
  const auto ns = static_cast<Eigen::Index>(n_sensors_);
  // sensors in front
  Eigen::VectorXi perm(nt + ns);
  for (Eigen::Index i = 0; i < ns; ++i) perm[i] = static_cast<int>(nt + i);
  for (Eigen::Index i = 0; i < nt; ++i) perm[ns + i] = static_cast<int>(i);
  ComplexMatrix zu(nt + ns, nt + ns);
  for (Eigen::Index a = 0; a < nt + ns; ++a)
    for (Eigen::Index b = 0; b < nt + ns; ++b) zu(a, b) = za(perm[a], perm[b]);
  return {sensor_bank.transmit(f, ns), PartitionedImpedance(zu, ns), array_bank.receive(f, nt),
          ctx_.config().reference_ohms};
}

ComplexMatrix LinkSystem::uplink_channel(double f, const ComplexMatrix& za, const MatchingBank& sensor_bank,
                                         const MatchingBank& array_bank) const {
  return build_channel_matrix(uplink_chain(f, za, sensor_bank, array_bank));
}

double LinkSystem::downlink_perfect_gain(double f, const ComplexMatrix& za, int max_iters) const {
  const auto nt = static_cast<Eigen::Index>(ctx_.size());
  const auto ns = static_cast<Eigen::Index>(n_sensors_);
  const double r = ctx_.config().reference_ohms;
  const PartitionedImpedance zp(za, nt);
  AlternatingMatchOptions opts = ctx_.config().matching.alternating;
  opts.max_iters = max_iters;
  const SideMatch side{MatchStyle::IdealMultiport, {r, 0.0}};
  const auto res = alternating_match(zp, r, side, side, f, opts);
  const Chain chain{res.tx.transmit(f, nt), zp, res.rx.receive(f, ns), r};
  return build_channel_matrix(chain).row(0).squaredNorm();
}

UplinkBin LinkSystem::uplink(double f, const ComplexMatrix& za, const MatchingBank& sensor_bank,
                             const MatchingBank& array_bank) const {
  UplinkBin bin;
  bin.frequency = f;
  const auto nt = static_cast<Eigen::Index>(ctx_.size());
  const Config& cfg = ctx_.config();
  try {
    const Chain chain = uplink_chain(f, za, sensor_bank, array_bank);
    const ChainAnalysis an = analyze_chain(chain);
    bin.h = build_channel_matrix(chain, an);
    bin.z_t_in = an.in.t;

    NoiseInputs in;
    in.z_r_out = an.out.r;
    in.z_a_out = an.out.a;
    in.d_load = an.d_load;
    in.d_receive = an.d_receive;
    in.self_capacitance.resize(nt);
    in.radiation_resistance.resize(nt);
    std::vector<CoilGeometry> geoms;
    for (Eigen::Index i = 0; i < nt; ++i) {
      const auto& g = ctx_.coils()[static_cast<std::size_t>(i)].geometry();
      const CoilCircuit c = coil_circuit(g, f);
      in.self_capacitance[i] = c.self_capacitance;
      in.radiation_resistance[i] = c.radiation_resistance;
      geoms.push_back(g);
    }
    in.phi = spatial_correlation(geoms, f, cfg.noise.correlation);
    in.frequency = f;
    bin.k = build_noise_covariance(cfg.noise, in, cfg.uplink.bin_width, cfg.reference_ohms);
  } catch (const NumericalError& e) {
    bin.valid = false;
    bin.error = e.what();
  }
  return bin;
}

}  // namespace misim
