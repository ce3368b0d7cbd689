#include "misim/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "misim/linalg.hpp"
#include "misim/optimize.hpp"

namespace misim {

void LnaNoiseParams::validate() const {
  if (!(beta >= 0.0)) throw DomainError("lna: beta must be >= 0");
  if (!(noise_resistance > 0.0)) throw DomainError("lna: noise resistance must be > 0");
  if (!(std::abs(correlation) <= 1.0)) throw DomainError("lna: |correlation| must be <= 1");
  if (!(iid_variance >= 0.0)) throw DomainError("lna: iid variance must be >= 0");
}

Complex LnaNoiseParams::z_opt() const {
  const double im = correlation.imag();
  return noise_resistance * Complex(std::sqrt(1.0 - im * im), im);
}

namespace {

RealMatrix sym_real(const ComplexMatrix& z) { return 0.5 * (z.real() + z.real().transpose()); }
RealMatrix sym_imag(const ComplexMatrix& z) { return 0.5 * (z.imag() + z.imag().transpose()); }

LumpedNetwork ideal(ComplexMatrix m, double f) {
  LumpedNetwork net;
  net.topology = Topology::IdealMultiport;
  net.design_frequency = f;
  net.ideal_matrix = std::move(m);
  return net;
}

void require_square(const ComplexMatrix& z, const char* what) {
  if (z.rows() != z.cols() || z.rows() == 0) throw DomainError(std::string(what) + ": impedance must be square and nonempty");
}

}  // namespace

LumpedNetwork synthesize_tx_match_multiport(const ComplexMatrix& z_in, Complex target, double f_design) {
  require_square(z_in, "power match");
  if (!(target.real() > 0.0)) throw DomainError("power match: target needs positive resistance");
  const Eigen::Index n = z_in.rows();
  const RealMatrix root = linalg::sqrtm_spd(sym_real(z_in), "Re Z_A^in") * std::sqrt(target.real());
  ComplexMatrix m = ComplexMatrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n).diagonal().setConstant(Complex(0.0, target.imag()));
  m.topRightCorner(n, n) = kJ * root.cast<Complex>();
  m.bottomLeftCorner(n, n) = kJ * root.transpose().cast<Complex>();
  m.bottomRightCorner(n, n) = -kJ * sym_imag(z_in).cast<Complex>();
  return ideal(std::move(m), f_design);
}

LumpedNetwork synthesize_power_match_multiport(const ComplexMatrix& z_in, double reference_ohms, double f_design) {
  return synthesize_tx_match_multiport(z_in, Complex(reference_ohms, 0.0), f_design);
}

LumpedNetwork synthesize_rx_match_multiport(const ComplexMatrix& z_out, Complex target, double f_design) {
  require_square(z_out, "noise match");
  if (!(target.real() > 0.0)) throw DomainError("noise match: target needs positive resistance");
  const Eigen::Index n = z_out.rows();
  const RealMatrix root = linalg::sqrtm_spd(sym_real(z_out), "Re Z_A^out") * std::sqrt(target.real());
  ComplexMatrix m = ComplexMatrix::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = -kJ * sym_imag(z_out).cast<Complex>();
  m.topRightCorner(n, n) = kJ * root.transpose().cast<Complex>();
  m.bottomLeftCorner(n, n) = kJ * root.cast<Complex>();
  m.bottomRightCorner(n, n).diagonal().setConstant(Complex(0.0, target.imag()));
  return ideal(std::move(m), f_design);
}

LumpedNetwork synthesize_noise_match_multiport(const ComplexMatrix& z_out, const LnaNoiseParams& lna, double f_design) {
  lna.validate();
  return synthesize_rx_match_multiport(z_out, lna.z_opt(), f_design);
}

namespace {

std::vector<Eigen::Matrix2cd> two_ports(const std::vector<LumpedNetwork>& nets, double f, Eigen::Index n) {
  if (static_cast<Eigen::Index>(nets.size()) != n) throw DomainError("matching bank: network count does not match ports");
  std::vector<Eigen::Matrix2cd> out;
  out.reserve(nets.size());
  for (const auto& net : nets) out.emplace_back(evaluate_lumped(net, f));
  return out;
}

}  // namespace

PartitionedImpedance MatchingBank::transmit(double f_hz, Eigen::Index n_ports) const {
  if (is_multiport()) return {evaluate_lumped(networks[0], f_hz), n_ports};
  return transmit_multiport(two_ports(networks, f_hz, n_ports));
}

PartitionedImpedance MatchingBank::receive(double f_hz, Eigen::Index n_ports) const {
  if (is_multiport()) return {evaluate_lumped(networks[0], f_hz), n_ports};
  return receive_multiport(two_ports(networks, f_hz, n_ports));
}

MatchingBank through_bank(Eigen::Index n_ports) {
  MatchingBank b;
  b.networks.assign(static_cast<std::size_t>(n_ports), LumpedNetwork{});
  return b;
}

MatchingBank synthesize_tx_bank(const ComplexMatrix& z_in, const SideMatch& spec, double f_design) {
  switch (spec.style) {
    case MatchStyle::IdealMultiport: return {{synthesize_tx_match_multiport(z_in, spec.target, f_design)}};
    case MatchStyle::Through: return through_bank(z_in.rows());
    case MatchStyle::LNetworkPerPort: break;
  }
  MatchingBank b;
  for (Eigen::Index i = 0; i < z_in.rows(); ++i)
    b.networks.push_back(synthesize_L_network(z_in(i, i), std::conj(spec.target), f_design));
  return b;
}

MatchingBank synthesize_rx_bank(const ComplexMatrix& z_out, const SideMatch& spec, double f_design) {
  switch (spec.style) {
    case MatchStyle::IdealMultiport: return {{synthesize_rx_match_multiport(z_out, spec.target, f_design)}};
    case MatchStyle::Through: return through_bank(z_out.rows());
    case MatchStyle::LNetworkPerPort: break;
  }
  MatchingBank b;
  for (Eigen::Index i = 0; i < z_out.rows(); ++i)
    b.networks.push_back(synthesize_L_network(z_out(i, i), std::conj(spec.target), f_design));
  return b;
}

AlternatingMatchResult alternating_match(const PartitionedImpedance& za, double reference_ohms, const SideMatch& tx,
                                         const SideMatch& rx, double f_design, const AlternatingMatchOptions& opts) {
  const Eigen::Index nt = za.n_front();
  const Eigen::Index nr = za.n_back();
  AlternatingMatchResult res;
  ComplexMatrix z_in = za.front();
  ComplexMatrix z_out = za.back();
  res.tx = synthesize_tx_bank(z_in, tx, f_design);
  res.rx = synthesize_rx_bank(z_out, rx, f_design);
  int growth = 0;
  for (int it = 1; it <= opts.max_iters; ++it) {
    res.iterations = it;
    Chain chain{res.tx.transmit(f_design, nt), za, res.rx.receive(f_design, nr), reference_ohms};
    const ComplexMatrix new_in = input_impedances(chain).a;
    res.tx = synthesize_tx_bank(new_in, tx, f_design);
    chain.zt = res.tx.transmit(f_design, nt);
    const ComplexMatrix new_out = output_impedances(chain).a;
    res.rx = synthesize_rx_bank(new_out, rx, f_design);
    const double change = std::max((new_in - z_in).norm() / new_in.norm(), (new_out - z_out).norm() / new_out.norm());
    z_in = new_in;
    z_out = new_out;
    growth = (!res.history.empty() && change > res.history.back()) ? growth + 1 : 0;
    res.history.push_back(change);
    if (change < opts.tol) {
      res.converged = true;
      break;
    }
    if (growth >= 3) {
      res.diverged = true;
      break;
    }
  }
  return res;
}

ReactanceSearchResult maximize_over_reactances(const std::function<double(const std::vector<double>&)>& objective,
                                               const std::vector<double>& x0, const ReactanceSearchOptions& opts) {
  const std::size_t n = x0.size();
  double top = 0.0;
  for (double v : x0) top = std::max(top, std::abs(v));
  std::vector<double> scale(n);
  for (std::size_t k = 0; k < n; ++k) scale[k] = std::max({std::abs(x0[k]), 1e-3 * top, 1e-9});
  auto to_x = [&](const std::vector<double>& u) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = scale[k] * std::sinh(u[k]);
    return x;
  };
  std::vector<double> u0(n);
  for (std::size_t k = 0; k < n; ++k) u0[k] = std::asinh(x0[k] / scale[k]);
  auto cost = [&](const std::vector<double>& u) { return -objective(to_x(u)); };

  ReactanceSearchResult res;
  res.initial_objective = objective(x0);
  res.evaluations = 1;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, opts.spread);
  NelderMeadOptions nm;
  nm.max_evaluations = opts.max_evaluations_per_start;
  nm.max_restarts = 2;
  NelderMeadResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    std::vector<double> start = u0;
    if (s > 0)
      for (double& v : start) v += gauss(rng);
    NelderMeadResult r = nelder_mead(cost, start, nm);
    res.evaluations += r.evaluations;
    if (r.value < best.value) best = r;
  }
  // polish the winner with a generous budget
  nm.max_evaluations = 4 * opts.max_evaluations_per_start;
  nm.max_restarts = 6;
  nm.initial_step = 0.05;
  NelderMeadResult pol = nelder_mead(cost, best.x, nm);
  res.evaluations += pol.evaluations;
  if (pol.value < best.value) best = pol;

  res.reactances = to_x(best.x);
  res.objective = -best.value;
  res.improved = res.objective > res.initial_objective;
  if (!res.improved) {
    res.reactances = x0;
    res.objective = res.initial_objective;
  }
  return res;
}

std::array<double, 3> T_start_from_L(const LumpedNetwork& l_net) {
  const double f = l_net.design_frequency;
  double series = 0.0, shunt = 0.0;
  for (const auto& e : l_net.elements) {
    const double x = element_impedance(e, f).imag();
    (e.placement == Placement::Series ? series : shunt) = x;
  }
  double ref = std::max(std::abs(series), std::abs(shunt));
  if (ref == 0.0) ref = 1.0;
  const double stub = 0.01 * ref;
  if (series == 0.0) series = stub;
  if (shunt == 0.0) shunt = 100.0 * ref;
  if (l_net.topology == Topology::LShuntFirst) return {stub, series, shunt};
  return {series, stub, shunt};
}

}  // namespace misim
