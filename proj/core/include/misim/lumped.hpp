#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "misim/types.hpp"

namespace misim {

enum class Topology { LSeriesFirst, LShuntFirst, T, Pi, IdealMultiport, Through };
enum class ElementKind { Inductor, Capacitor };
enum class Placement { Series, Shunt };

std::string to_string(Topology t);

struct LumpedElement {
  ElementKind kind = ElementKind::Inductor;
  double value = 0.0;  // henries or farads
  Placement placement = Placement::Series;
  int port_pair = 0;
};

/// Matching network. Two-port topologies list elements from port 1 (generator
/// or load side) to port 2 (antenna side).
struct LumpedNetwork {
  Topology topology = Topology::Through;
  std::vector<LumpedElement> elements;
  double design_frequency = 0.0;
  std::optional<ComplexMatrix> ideal_matrix;  // IdealMultiport only
};

/// Element realizing a signed series reactance (x > 0 inductor, x < 0 capacitor) at f.
LumpedElement series_element(double reactance, double f_hz);
/// Element realizing a signed shunt susceptance (b > 0 capacitor, b < 0 inductor) at f.
LumpedElement shunt_element(double susceptance, double f_hz);
/// Impedance of an element at f.
Complex element_impedance(const LumpedElement& e, double f_hz);

/// Two-port Z of a lumped network (ABCD cascade). A network with no shunt path
/// (C = 0) gets an open-circuit shunt of kOpenCircuitOhms at port 1.
/// IdealMultiport returns the stored matrix with reactances scaled by f / f_design.
ComplexMatrix evaluate_lumped(const LumpedNetwork& net, double f_hz);

/// Two-element L network that, terminated in z_load at port 2, presents
/// conj(z_target) at port 1 at f_design.
LumpedNetwork synthesize_L_network(Complex z_load, Complex z_target, double f_design);

/// T network: series x1 at port 1, shunt x3, series x2 at port 2 (signed reactances).
LumpedNetwork make_T_network(double x1, double x2, double x3, double f_design);
/// Signed reactances (x1, x2, x3) of a T network at its design frequency.
std::array<double, 3> T_network_reactances(const LumpedNetwork& net);

}  // namespace misim
