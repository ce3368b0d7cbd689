#include "misim/channel.hpp"

#include <cmath>

#include "misim/linalg.hpp"

namespace misim {

ComplexMatrix build_channel_matrix(const Chain& chain) { return build_channel_matrix(chain, analyze_chain(chain)); }

ComplexMatrix build_channel_matrix(const Chain& chain, const ChainAnalysis& an) {
  const double r = chain.reference_ohms;
  const Eigen::Index nt = chain.n_tx();
  const RealMatrix re_in = 0.5 * (an.in.t.real() + an.in.t.real().transpose());
  const RealMatrix a = linalg::inv_sqrtm_spd(re_in, "Re Z_T^in");
  const ComplexMatrix gen = an.in.t + r * ComplexMatrix::Identity(nt, nt);
  return (1.0 / std::sqrt(r)) * an.d * gen * a.cast<Complex>();
}

RealVector per_generator_power(const ComplexMatrix& q, const ComplexMatrix& z_t_in) {
  if (q.rows() != q.cols() || z_t_in.rows() != z_t_in.cols() || q.rows() != z_t_in.rows())
    throw DomainError("per_generator_power: dimension mismatch");
  const RealMatrix re_in = 0.5 * (z_t_in.real() + z_t_in.real().transpose());
  const ComplexMatrix a = linalg::inv_sqrtm_spd(re_in, "Re Z_T^in").cast<Complex>();
  const ComplexMatrix s = z_t_in * (a * q * a);
  return s.diagonal().real();
}

void NoiseEnvironment::validate() const {
  if (!(antenna_temperature >= 0.0) || !(physical_temperature >= 0.0))
    throw DomainError("noise: temperatures must be >= 0");
  lna.validate();
}

RealMatrix spatial_correlation(const std::vector<CoilGeometry>& coils, double f_hz, CorrelationModel model) {
  const auto n = static_cast<Eigen::Index>(coils.size());
  if (model == CorrelationModel::Identity) return RealMatrix::Identity(n, n);
  const double k = wavenumber(f_hz);
  RealMatrix phi(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    phi(m, m) = 1.0;
    for (Eigen::Index q = m + 1; q < n; ++q) {
      const auto& a = coils[static_cast<std::size_t>(m)];
      const auto& b = coils[static_cast<std::size_t>(q)];
      const double d = (a.center - b.center).norm();
      const double v = std::cyl_bessel_j(0.0, k * d) * a.axis.normalized().dot(b.axis.normalized());
      phi(m, q) = phi(q, m) = v;
    }
  }
  return phi;
}

namespace {

// Eigenvalues below zero set to zero.
ComplexMatrix clip_psd(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(linalg::hermitian_part(a));
  const RealVector ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

NoiseBreakdown noise_sources(const NoiseEnvironment& env, const NoiseInputs& in, double bandwidth_hz) {
  env.validate();
  const Eigen::Index n = in.z_r_out.rows();
  if (in.d_receive.rows() != n || in.z_a_out.rows() != n || in.self_capacitance.size() != n ||
      in.radiation_resistance.size() != n || in.phi.rows() != n)
    throw DomainError("noise: receive-side inputs have inconsistent sizes");
  const double kb = constants::kB;
  const double w = angular(in.frequency);
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);

  const ComplexMatrix d_c = eye - in.z_a_out * (kJ * w) * in.self_capacitance.cast<Complex>().asDiagonal();
  const ComplexMatrix s =
      in.d_receive * d_c * in.radiation_resistance.cwiseSqrt().cast<Complex>().asDiagonal();

  NoiseBreakdown out;
  out.extrinsic = 4.0 * kb * env.antenna_temperature * bandwidth_hz * s * in.phi.cast<Complex>() * s.adjoint();
  // Re Z_R^out carries every loss of the network at temperature T; the
  // radiative share S S^H is extrinsic and is taken out.
  const ComplexMatrix ohmic = linalg::hermitian_part(in.z_r_out) - s * s.adjoint();
  out.thermal = 4.0 * kb * env.physical_temperature * bandwidth_hz * clip_psd(ohmic);
  const auto& lna = env.lna;
  const ComplexMatrix& z = in.z_r_out;
  const ComplexMatrix rz = std::conj(lna.correlation) * z;
  out.lna = lna.beta * bandwidth_hz *
            (lna.noise_resistance * lna.noise_resistance * eye + z * z.adjoint() -
             lna.noise_resistance * (rz + rz.adjoint()));
  return out;
}

ComplexMatrix build_noise_covariance(const NoiseEnvironment& env, const NoiseInputs& in, double bandwidth_hz,
                                     double reference_ohms) {
  const NoiseBreakdown nb = noise_sources(env, in, bandwidth_hz);
  const Eigen::Index n = in.z_r_out.rows();
  const ComplexMatrix psi = nb.extrinsic + nb.thermal + nb.lna;
  ComplexMatrix k = (in.d_load * psi * in.d_load.adjoint() +
                     env.lna.iid_variance * ComplexMatrix::Identity(n, n)) /
                    reference_ohms;
  return linalg::repair_psd(linalg::hermitian_part(k), 1e-12, "noise covariance");
}

}  // namespace misim
