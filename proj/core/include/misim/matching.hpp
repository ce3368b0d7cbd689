#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "misim/lumped.hpp"
#include "misim/multiport.hpp"
#include "misim/types.hpp"

namespace misim {

/// LNA noise: voltage source v_N and current source i_N with
/// E|i_N|^2 = beta, E|v_N|^2 = beta R_N^2, E[v_N i_N^*] = rho beta R_N.
struct LnaNoiseParams {
  double beta = 5e-23;           // A^2/Hz
  double noise_resistance = 50;  // R_N, ohms
  Complex correlation{0.5, 0.3};
  double iid_variance = 0.0;  // sigma^2_iid, V^2

  void validate() const;
  /// Z_opt = R_N (sqrt(1 - Im(rho)^2) + j Im(rho)).
  Complex z_opt() const;
};

/// Lossless reciprocal Z_T with Z_T^in = target I, given the antenna input
/// impedance Z_in. target = R gives power matching.
LumpedNetwork synthesize_power_match_multiport(const ComplexMatrix& z_in, double reference_ohms, double f_design);
LumpedNetwork synthesize_tx_match_multiport(const ComplexMatrix& z_in, Complex target, double f_design);

/// Lossless reciprocal Z_R with Z_R^out = Z_opt I, given the antenna output
/// impedance Z_out.
LumpedNetwork synthesize_noise_match_multiport(const ComplexMatrix& z_out, const LnaNoiseParams& lna, double f_design);
LumpedNetwork synthesize_rx_match_multiport(const ComplexMatrix& z_out, Complex target, double f_design);

/// Matching for one side of the chain: either one ideal multiport or one
/// two-port per coil.
struct MatchingBank {
  std::vector<LumpedNetwork> networks;

  bool is_multiport() const { return networks.size() == 1 && networks[0].topology == Topology::IdealMultiport; }
  /// Transmit side [G, A] at f.
  PartitionedImpedance transmit(double f_hz, Eigen::Index n_ports) const;
  /// Receive side [A, L] at f.
  PartitionedImpedance receive(double f_hz, Eigen::Index n_ports) const;
};

/// Bank of direct connections (no matching).
MatchingBank through_bank(Eigen::Index n_ports);

enum class MatchStyle { IdealMultiport, LNetworkPerPort, Through };

struct SideMatch {
  MatchStyle style = MatchStyle::IdealMultiport;
  Complex target{50.0, 0.0};  // Z_T^in (transmit) or Z_R^out (receive) to enforce
};

/// Transmit bank against the antenna input impedance; per-port L networks use
/// only the diagonal of z_in.
MatchingBank synthesize_tx_bank(const ComplexMatrix& z_in, const SideMatch& spec, double f_design);
MatchingBank synthesize_rx_bank(const ComplexMatrix& z_out, const SideMatch& spec, double f_design);

struct AlternatingMatchOptions {
  int max_iters = 10;
  double tol = 1e-4;
};

struct AlternatingMatchResult {
  MatchingBank tx;
  MatchingBank rx;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
  std::vector<double> history;  // max relative target change per iteration
};

/// Tx and Rx matching re-synthesized in turn against Z_A^in and Z_A^out until
/// both targets settle.
AlternatingMatchResult alternating_match(const PartitionedImpedance& za, double reference_ohms, const SideMatch& tx,
                                         const SideMatch& rx, double f_design,
                                         const AlternatingMatchOptions& opts = {});

struct ReactanceSearchOptions {
  int starts = 8;
  int max_evaluations_per_start = 600;
  std::uint64_t seed = 1;
  double spread = 0.7;  // start perturbation in asinh units
};

struct ReactanceSearchResult {
  std::vector<double> reactances;
  double objective = 0.0;
  double initial_objective = 0.0;
  bool improved = false;
  int evaluations = 0;
};

/// Maximizes objective(x) over signed reactances, searching in u = asinh(x/s)
/// with s = |x0| per component so that sign changes (L <-> C) stay reachable.
ReactanceSearchResult maximize_over_reactances(const std::function<double(const std::vector<double>&)>& objective,
                                               const std::vector<double>& x0, const ReactanceSearchOptions& opts = {});

/// T-network reactances (x1, x2, x3) mimicking an L network; the missing
/// element is a short stub of 1% of the present ones.
std::array<double, 3> T_start_from_L(const LumpedNetwork& l_net);

}  // namespace misim
