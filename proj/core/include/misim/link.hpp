#pragma once

#include <string>
#include <vector>

#include "misim/types.hpp"

namespace misim {

/// Sensor energy budget: half of the power beyond the activation threshold
/// goes to the uplink.
struct PowerBudget {
  double received_power = 0.0;        // P_R
  double activation_threshold = 0.0;  // P_0
  double uplink_power = 0.0;          // P_T,up
  bool in_outage = true;
};

PowerBudget make_power_budget(double received_power, double activation_threshold);

enum class Scheme { Simple, Elaborate };
std::string to_string(Scheme s);

struct RateResult {
  double total_rate = 0.0;   // bit/s
  RealMatrix per_bin_power;  // bins x nodes, watts
  RealVector per_bin_rate;   // bit/s
  Scheme scheme = Scheme::Simple;
  bool in_outage = false;
  bool unallocated = false;  // no bin had positive gain
  double kkt_residual = 0.0;
  std::vector<std::string> warnings;
};

struct DownlinkBeam {
  ComplexVector beamformer;  // unit norm
  double pte = 0.0;          // received power at the target / transmit power
  double sum_pte = 0.0;      // ||H w||^2
  bool constraint_met = true;
  bool outage = false;
};

/// w = h^* / ||h|| for a single receiver row h (y = h^T w); pte = ||h||^2.
DownlinkBeam mrt_downlink(const ComplexVector& h, double tx_power);

/// Maximizes ||H w||^2 subject to |H_t w|^2 P_T >= P_0 and ||w|| = 1. The
/// maximizer is the dominant eigenvector of H^H H + mu H_t^H H_t with mu >= 0
/// found by bisection. Falls back to target MRT when the constraint cannot be
/// met.
DownlinkBeam coop_downlink_beamform(const ComplexMatrix& h, double tx_power, double activation_power,
                                    Eigen::Index target_index = 0);

/// P_k = max(0, mu - 1/g_k) with sum P_k = P_total; rate = W sum log2(1 + P_k g_k).
RateResult waterfill(const RealVector& gains, double total_power, double bin_width_hz);

/// Equal power over the bins listed (others get nothing).
RateResult flat_allocation(const RealVector& gains, const std::vector<bool>& use_bin, double total_power,
                           double bin_width_hz);

/// h^H K^-1 h.
double whitened_mrc_gain(const ComplexVector& h, const ComplexMatrix& k);

/// K^-1/2 H with the Hermitian inverse square root.
ComplexMatrix whiten(const ComplexMatrix& h, const ComplexMatrix& k);

}  // namespace misim
