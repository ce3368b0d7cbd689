#pragma once

#include <string>
#include <vector>

#include "misim/coil_models.hpp"
#include "misim/matching.hpp"
#include "misim/multiport.hpp"
#include "misim/types.hpp"

namespace misim {

/// y = H x + n with x normalized to generator active power and y the load
/// power wave; n ~ CN(0, K).
struct NarrowbandChannel {
  ComplexMatrix h;
  ComplexMatrix k;
  double center_frequency = 0.0;
  double bandwidth = 0.0;
  bool valid = true;
  std::string error;
};

/// H = R^-1/2 D (Z_T^in + R I) (Re Z_T^in)^-1/2.
ComplexMatrix build_channel_matrix(const Chain& chain);
ComplexMatrix build_channel_matrix(const Chain& chain, const ChainAnalysis& analysis);

/// Per-generator active powers diag(Re(Z_T^in E[i_G i_G^H])) for E[x x^H] = q.
RealVector per_generator_power(const ComplexMatrix& q, const ComplexMatrix& z_t_in);

enum class CorrelationModel { Bessel, Identity };

struct NoiseEnvironment {
  double antenna_temperature = 310.0;   // T_A, kelvin
  double physical_temperature = 310.0;  // T, kelvin
  CorrelationModel correlation = CorrelationModel::Bessel;
  LnaNoiseParams lna{};

  void validate() const;
};

/// Phi_mn = J0(k d_mn) o_m . o_n (or identity).
RealMatrix spatial_correlation(const std::vector<CoilGeometry>& coils, double f_hz, CorrelationModel model);

/// Receive-side quantities at one frequency, as produced by the chain analysis.
struct NoiseInputs {
  ComplexMatrix z_r_out;      // Z_R^out
  ComplexMatrix z_a_out;      // Z_A^out
  ComplexMatrix d_load;       // D_L
  ComplexMatrix d_receive;    // D_R
  RealVector self_capacitance;     // C_self per receive coil
  RealVector radiation_resistance; // R_rad per receive coil
  RealMatrix phi;                  // spatial correlation
  double frequency = 0.0;
};

struct NoiseBreakdown {
  ComplexMatrix extrinsic;
  ComplexMatrix thermal;
  ComplexMatrix lna;
};

/// Psi terms (volts^2 at the LNA inputs over bandwidth W).
NoiseBreakdown noise_sources(const NoiseEnvironment& env, const NoiseInputs& in, double bandwidth_hz);

/// K = (D_L Psi D_L^H + sigma_iid^2 I) / R.
ComplexMatrix build_noise_covariance(const NoiseEnvironment& env, const NoiseInputs& in, double bandwidth_hz,
                                     double reference_ohms);

}  // namespace misim
