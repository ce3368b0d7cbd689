#include "misim/lumped.hpp"

#include <algorithm>
#include <cmath>

#include "misim/coupling.hpp"

namespace misim {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::LSeriesFirst: return "L_SERIES_FIRST";
    case Topology::LShuntFirst: return "L_SHUNT_FIRST";
    case Topology::T: return "T";
    case Topology::Pi: return "PI";
    case Topology::IdealMultiport: return "IDEAL_MULTIPORT";
    case Topology::Through: return "THROUGH";
  }
  return "?";
}

LumpedElement series_element(double reactance, double f_hz) {
  const double w = angular(f_hz);
  if (reactance == 0.0 || !std::isfinite(reactance)) throw DomainError("series_element: reactance must be finite and nonzero");
  if (reactance > 0.0) return {ElementKind::Inductor, reactance / w, Placement::Series, 0};
  return {ElementKind::Capacitor, -1.0 / (w * reactance), Placement::Series, 0};
}

LumpedElement shunt_element(double susceptance, double f_hz) {
  const double w = angular(f_hz);
  if (susceptance == 0.0 || !std::isfinite(susceptance)) throw DomainError("shunt_element: susceptance must be finite and nonzero");
  if (susceptance > 0.0) return {ElementKind::Capacitor, susceptance / w, Placement::Shunt, 0};
  return {ElementKind::Inductor, -1.0 / (w * susceptance), Placement::Shunt, 0};
}

Complex element_impedance(const LumpedElement& e, double f_hz) {
  const double w = angular(f_hz);
  if (e.kind == ElementKind::Inductor) return {0.0, w * e.value};
  return {0.0, -1.0 / (w * e.value)};
}

ComplexMatrix evaluate_lumped(const LumpedNetwork& net, double f_hz) {
  if (!(f_hz > 0.0)) throw DomainError("evaluate_lumped: frequency must be > 0");
  if (net.topology == Topology::IdealMultiport) {
    if (!net.ideal_matrix) throw DomainError("evaluate_lumped: ideal multiport without matrix");
    if (f_hz == net.design_frequency) return *net.ideal_matrix;
    // all-inductive realization: reactances grow linearly with frequency
    return *net.ideal_matrix * (f_hz / net.design_frequency);
  }
  Eigen::Matrix2cd abcd = Eigen::Matrix2cd::Identity();
  for (const auto& e : net.elements) {
    const Complex z = element_impedance(e, f_hz);
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
    if (e.placement == Placement::Series)
      m(0, 1) = z;
    else
      m(1, 0) = 1.0 / z;
    abcd = abcd * m;
  }
  if (abcd(1, 0) == Complex(0.0)) {
    Eigen::Matrix2cd open = Eigen::Matrix2cd::Identity();
    open(1, 0) = 1.0 / kOpenCircuitOhms;
    abcd = open * abcd;
  }
  const Complex a = abcd(0, 0), b = abcd(0, 1), c = abcd(1, 0), d = abcd(1, 1);
  ComplexMatrix z(2, 2);
  z(0, 0) = a / c;
  z(0, 1) = (a * d - b * c) / c;
  z(1, 0) = 1.0 / c;
  z(1, 1) = d / c;
  return z;
}

namespace {

struct Candidate {
  LumpedNetwork net;
  int inductors = 0;
};

Candidate finish(Topology topo, std::vector<LumpedElement> elems, double f) {
  Candidate c;
  c.net.topology = elems.empty() ? Topology::Through : topo;
  c.net.design_frequency = f;
  for (const auto& e : elems) c.inductors += e.kind == ElementKind::Inductor ? 1 : 0;
  c.net.elements = std::move(elems);
  return c;
}

}  // namespace

LumpedNetwork synthesize_L_network(Complex z_load, Complex z_target, double f_design) {
  if (!(f_design > 0.0)) throw DomainError("synthesize_L_network: design frequency must be > 0");
  if (!(z_load.real() > 0.0) || !(z_target.real() > 0.0))
    throw SynthesisError("synthesize_L_network: load and target need positive resistance");
  const Complex zd = std::conj(z_target);  // impedance to present at port 1
  const Complex yd = 1.0 / zd;
  const Complex yl = 1.0 / z_load;
  const double zscale = std::max(std::abs(zd), std::abs(z_load));
  const double yscale = 1.0 / std::min(std::abs(zd), std::abs(z_load));
  const double eps = 1e-12;
  std::vector<Candidate> cands;

  // shunt at port 1, series toward the load
  {
    const double rl = z_load.real();
    const double disc = rl / yd.real() - rl * rl;
    if (disc >= -eps * zscale * zscale) {
      const double root = std::sqrt(std::max(disc, 0.0));
      for (double sgn : {1.0, -1.0}) {
        const double xtot = sgn * root;
        const double xs = xtot - z_load.imag();
        const double bsh = yd.imag() - (1.0 / Complex(rl, xtot)).imag();
        std::vector<LumpedElement> el;
        if (std::abs(bsh) > eps * yscale) el.push_back(shunt_element(bsh, f_design));
        if (std::abs(xs) > eps * zscale) el.push_back(series_element(xs, f_design));
        cands.push_back(finish(Topology::LShuntFirst, std::move(el), f_design));
      }
    }
  }
  // series at port 1, shunt across the load
  {
    const double gl = yl.real();
    const double disc = gl / zd.real() - gl * gl;
    if (disc >= -eps * yscale * yscale) {
      const double root = std::sqrt(std::max(disc, 0.0));
      for (double sgn : {1.0, -1.0}) {
        const double btot = sgn * root;
        const double bsh = btot - yl.imag();
        const double xs = zd.imag() - (1.0 / Complex(gl, btot)).imag();
        std::vector<LumpedElement> el;
        if (std::abs(xs) > eps * zscale) el.push_back(series_element(xs, f_design));
        if (std::abs(bsh) > eps * yscale) el.push_back(shunt_element(bsh, f_design));
        cands.push_back(finish(Topology::LSeriesFirst, std::move(el), f_design));
      }
    }
  }
  if (cands.empty()) throw SynthesisError("synthesize_L_network: no L topology reaches the target");
  const auto best = std::min_element(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.net.elements.size() != b.net.elements.size()) return a.net.elements.size() < b.net.elements.size();
    return a.inductors < b.inductors;
  });
  return best->net;
}

LumpedNetwork make_T_network(double x1, double x2, double x3, double f_design) {
  LumpedNetwork net;
  net.topology = Topology::T;
  net.design_frequency = f_design;
  net.elements.push_back(series_element(x1, f_design));
  net.elements.push_back(shunt_element(-1.0 / x3, f_design));
  net.elements.push_back(series_element(x2, f_design));
  return net;
}

std::array<double, 3> T_network_reactances(const LumpedNetwork& net) {
  if (net.topology != Topology::T || net.elements.size() != 3) throw DomainError("T_network_reactances: not a T network");
  const double f = net.design_frequency;
  return {element_impedance(net.elements[0], f).imag(), element_impedance(net.elements[2], f).imag(),
          element_impedance(net.elements[1], f).imag()};
}

}  // namespace misim
