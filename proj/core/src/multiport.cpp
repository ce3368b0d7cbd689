#include "misim/multiport.hpp"

#include <sstream>

#include "misim/linalg.hpp"

namespace misim {

PartitionedImpedance::PartitionedImpedance(ComplexMatrix matrix, Eigen::Index n_front)
    : matrix_(std::move(matrix)), n_front_(n_front) {
  if (matrix_.rows() != matrix_.cols()) throw DomainError("PartitionedImpedance: matrix must be square");
  if (n_front_ < 0 || n_front_ > matrix_.rows()) throw DomainError("PartitionedImpedance: bad partition");
}

void Chain::check() const {
  std::ostringstream os;
  if (zt.n_front() != zt.n_back()) os << "Z_T must have equally many generator and antenna ports; ";
  if (zr.n_front() != zr.n_back()) os << "Z_R must have equally many antenna and load ports; ";
  if (zt.n_back() != za.n_front()) os << "Z_T antenna side does not match Z_A transmit ports; ";
  if (zr.n_front() != za.n_back()) os << "Z_R antenna side does not match Z_A receive ports; ";
  if (!(reference_ohms > 0.0)) os << "reference impedance must be > 0; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw DomainError("chain: " + msg);
}

namespace {

ComplexMatrix eye(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

// back - back_front (front + term)^-1 front_back
ComplexMatrix reduce_front(const PartitionedImpedance& z, const ComplexMatrix& term, const char* stage) {
  return z.back() - z.back_front() * linalg::solve(z.front() + term, z.front_back(), stage);
}

// front - front_back (back + term)^-1 back_front
ComplexMatrix reduce_back(const PartitionedImpedance& z, const ComplexMatrix& term, const char* stage) {
  return z.front() - z.front_back() * linalg::solve(z.back() + term, z.back_front(), stage);
}

}  // namespace

PortImpedances output_impedances(const Chain& chain) {
  chain.check();
  const double r = chain.reference_ohms;
  PortImpedances out;
  out.t = reduce_front(chain.zt, r * eye(chain.zt.n_front()), "Z_T^out");
  out.a = reduce_front(chain.za, out.t, "Z_A^out");
  out.r = reduce_front(chain.zr, out.a, "Z_R^out");
  return out;
}

PortImpedances input_impedances(const Chain& chain) {
  chain.check();
  const double r = chain.reference_ohms;
  PortImpedances in;
  in.r = reduce_back(chain.zr, r * eye(chain.zr.n_back()), "Z_R^in");
  in.a = reduce_back(chain.za, in.r, "Z_A^in");
  in.t = reduce_back(chain.zt, in.a, "Z_T^in");
  return in;
}

ChainAnalysis analyze_chain(const Chain& chain) {
  ChainAnalysis res;
  res.out = output_impedances(chain);
  res.in = input_impedances(chain);
  const double r = chain.reference_ohms;
  const Eigen::Index nt = chain.n_tx();
  const Eigen::Index nr = chain.n_rx();
  res.d_load = r * linalg::inverse(r * eye(nr) + res.out.r, "D_L");
  res.d_receive = linalg::solve((chain.zr.front() + res.out.a).transpose(), chain.zr.back_front().transpose(), "D_R")
                      .transpose();
  const ComplexMatrix gen = linalg::inverse(chain.zt.front() + r * eye(nt), "Y_T generator loop");
  res.y_transmit = linalg::solve(chain.za.front() + res.out.t, chain.zt.back_front() * gen, "Y_T");
  res.d = res.d_load * res.d_receive * chain.za.back_front() * res.y_transmit;
  return res;
}

ComplexMatrix transfer_matrix(const Chain& chain) { return analyze_chain(chain).d; }

Complex two_port_input_impedance(const Eigen::Matrix2cd& z, Complex z_load) {
  return z(0, 0) - z(0, 1) * z(1, 0) / (z(1, 1) + z_load);
}

Complex two_port_output_impedance(const Eigen::Matrix2cd& z, Complex z_source) {
  return z(1, 1) - z(1, 0) * z(0, 1) / (z(0, 0) + z_source);
}

PartitionedImpedance transmit_multiport(const std::vector<Eigen::Matrix2cd>& two_ports) {
  const auto n = static_cast<Eigen::Index>(two_ports.size());
  ComplexMatrix z = ComplexMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = two_ports[static_cast<std::size_t>(i)];
    z(i, i) = t(0, 0);
    z(i, n + i) = t(0, 1);
    z(n + i, i) = t(1, 0);
    z(n + i, n + i) = t(1, 1);
  }
  return {z, n};
}

PartitionedImpedance receive_multiport(const std::vector<Eigen::Matrix2cd>& two_ports) {
  const auto n = static_cast<Eigen::Index>(two_ports.size());
  ComplexMatrix z = ComplexMatrix::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = two_ports[static_cast<std::size_t>(i)];
    z(i, i) = t(1, 1);
    z(i, n + i) = t(1, 0);
    z(n + i, i) = t(0, 1);
    z(n + i, n + i) = t(0, 0);
  }
  return {z, n};
}

}  // namespace misim
