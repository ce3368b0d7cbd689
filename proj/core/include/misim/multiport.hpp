#pragma once

#include "misim/types.hpp"

namespace misim {

/// Square impedance matrix whose ports split into a front group followed by a
/// back group. Used for all three stages of the chain:
///   transmit matching  Z_T: front = generator side (G), back = antenna side (A)
///   antennas           Z_A: front = transmit coils (T), back = receive coils (R)
///   receive matching   Z_R: front = antenna side (A), back = load side (L)
class PartitionedImpedance {
 public:
  PartitionedImpedance() = default;
  PartitionedImpedance(ComplexMatrix matrix, Eigen::Index n_front);

  const ComplexMatrix& matrix() const { return matrix_; }
  Eigen::Index n_front() const { return n_front_; }
  Eigen::Index n_back() const { return matrix_.rows() - n_front_; }

  ComplexMatrix front() const { return matrix_.topLeftCorner(n_front_, n_front_); }
  ComplexMatrix back() const { return matrix_.bottomRightCorner(n_back(), n_back()); }
  /// back x front block (e.g. Z_T:AG, Z_A:RT, Z_R:LA).
  ComplexMatrix back_front() const { return matrix_.bottomLeftCorner(n_back(), n_front_); }
  /// front x back block (e.g. Z_T:AG^T, Z_A:TR, Z_R:LA^T).
  ComplexMatrix front_back() const { return matrix_.topRightCorner(n_front_, n_back()); }

 private:
  ComplexMatrix matrix_;
  Eigen::Index n_front_ = 0;
};

struct PortImpedances {
  ComplexMatrix t;  // Z_T^out or Z_T^in
  ComplexMatrix a;
  ComplexMatrix r;
};

/// Generator-to-load chain G -> T -> A -> R -> L with reference impedance R at
/// generators and loads.
struct Chain {
  PartitionedImpedance zt;
  PartitionedImpedance za;
  PartitionedImpedance zr;
  double reference_ohms = 50.0;

  Eigen::Index n_tx() const { return za.n_front(); }
  Eigen::Index n_rx() const { return za.n_back(); }
  /// Throws DomainError when block sizes do not chain.
  void check() const;
};

/// Output impedances with all inputs terminated, evaluated T -> A -> R.
PortImpedances output_impedances(const Chain& chain);
/// Input impedances with terminated outputs, evaluated R -> A -> T.
PortImpedances input_impedances(const Chain& chain);

struct ChainAnalysis {
  PortImpedances out;
  PortImpedances in;
  ComplexMatrix d_load;      // D_L = R (R I + Z_R^out)^-1
  ComplexMatrix d_receive;   // D_R = Z_R:LA (Z_R:A + Z_A^out)^-1
  ComplexMatrix y_transmit;  // maps generator voltages to transmit-coil currents
  ComplexMatrix d;           // v_L = D v_G
};

/// Full chain analysis: port impedances, stage gains and D = D_L D_R Z_A:RT Y_T.
/// Y_T = (Z_A:T + Z_T^out)^-1 Z_T:AG (Z_T:G + R I)^-1 is the Thevenin source of
/// the transmit side, exact without assuming Z_A:TR = 0.
ChainAnalysis analyze_chain(const Chain& chain);

/// D only.
ComplexMatrix transfer_matrix(const Chain& chain);

/// Two-port input impedance z11 - z12 z21 / (z22 + z_load).
Complex two_port_input_impedance(const Eigen::Matrix2cd& z, Complex z_load);
/// Two-port output impedance looking into port 2 with port 1 terminated.
Complex two_port_output_impedance(const Eigen::Matrix2cd& z, Complex z_source);

/// Per-port two-ports (port 1 = generator/load side, port 2 = antenna side)
/// laid out as a transmit multiport [G, A] or receive multiport [A, L].
PartitionedImpedance transmit_multiport(const std::vector<Eigen::Matrix2cd>& two_ports);
PartitionedImpedance receive_multiport(const std::vector<Eigen::Matrix2cd>& two_ports);

}  // namespace misim
