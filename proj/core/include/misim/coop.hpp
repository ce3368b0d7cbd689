#pragma once

#include <vector>

#include "misim/link.hpp"
#include "misim/types.hpp"

namespace misim {

/// Per-node power constraint matrices B_n: tr(Q B_n) is the active power of
/// generator n for E[x x^H] = Q, given the transmit-side Z_T^in. Sum B_n = I.
std::vector<ComplexMatrix> node_power_matrices(const ComplexMatrix& z_t_in);

struct LogDetOptions {
  int max_dual_iters = 400;
  int max_primal_iters = 500;  // Newton steps of the barrier polish
  double gap_tol = 1e-5;  // relative duality gap
};

struct LogDetResult {
  ComplexMatrix q;
  double rate = 0.0;  // log2 det(I + H Q H^H), bit/s/Hz
  double dual_bound = 0.0;
  double relative_gap = 0.0;
  bool converged = false;
};

/// max log2 det(I + H Q H^H) over Q >= 0 with tr(Q B_n) <= P_n. Dual descent
/// over the multipliers (the inner problem is waterfilling on H B^-1/2),
/// primal recovery, and a log-barrier Newton polish when the gap stays open.
LogDetResult max_logdet_per_node(const ComplexMatrix& h_white, const std::vector<ComplexMatrix>& b,
                                 const RealVector& budgets, const LogDetOptions& opts = {});

/// Same objective with the single constraint tr(Q) <= P (eigen-waterfilling).
LogDetResult max_logdet_sum_power(const ComplexMatrix& h_white, double total_power);

struct CoopUplinkBin {
  ComplexMatrix h_white;  // K^-1/2 H, receivers x nodes
  ComplexMatrix z_t_in;   // sensors' Z_T^in (node coupling)
};

/// Achievable rate sum_k W R_k. With heuristic_alloc each node splits its
/// budget over bins by waterfilling on its own stand-alone SISO gains;
/// otherwise budgets are split evenly.
RateResult coop_uplink_rate(const std::vector<CoopUplinkBin>& bins, const RealVector& budgets, double bin_width_hz,
                            bool heuristic_alloc = true, const LogDetOptions& opts = {});

}  // namespace misim
