#include "misim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "misim/linalg.hpp"

namespace misim {

using constants::mu0;
using constants::pi;

OrientationFactors orientation_factors(const CoilGeometry& m, const CoilGeometry& n) {
  OrientationFactors of;
  const Vec3 delta = n.center - m.center;
  of.distance = delta.norm();
  if (!(of.distance > 0.0)) throw DomainError("orientation_factors: coincident coil centers");
  of.direction = delta / of.distance;
  const Vec3& e = of.direction;
  const Vec3& om = m.axis;
  const Vec3& on = n.axis;
  const double em = e.dot(om);
  const double en = e.dot(on);
  const double mn = om.dot(on);
  of.j_nf = 1.5 * em * en - 0.5 * mn;
  of.j_ff = mn - em * en;
  return of;
}

Complex mutual_impedance_dipole(const CoilGeometry& m, const CoilGeometry& n, double f_hz) {
  if (!(f_hz > 0.0)) throw DomainError("mutual_impedance_dipole: frequency must be > 0");
  const OrientationFactors of = orientation_factors(m, n);
  const double k = wavenumber(f_hz);
  const double kd = k * of.distance;
  const double lbar = mu0 / (2.0 * pi) * m.turns * m.area() * n.turns * n.area() * k * k * k;
  const Complex near = (1.0 / (kd * kd * kd) + kJ / (kd * kd)) * of.j_nf;
  const Complex far = of.j_ff / (2.0 * kd);
  return kJ * angular(f_hz) * lbar * (near + far) * std::exp(-kJ * kd);
}

namespace {

void check_separation(const CoilGeometry& a, const CoilGeometry& b) {
  const double d = (a.center - b.center).norm();
  if (!(d > 2.0 * (a.wire_radius + b.wire_radius))) {
    throw DomainError("mutual impedance: coil geometries intersect");
  }
}

double bounding_radius(const CoilGeometry& g) { return std::hypot(g.loop_radius, 0.5 * g.height()) + g.wire_radius; }

// Sum of w_ij exp(-jk d)/d and of |w_ij|/d (scale for the absolute floor).
std::pair<Complex, double> kernel_sum(const CurveSamples& sa, const CurveSamples& sb, double k) {
  Complex acc = 0.0;
  double mag = 0.0;
  for (std::size_t i = 0; i < sa.points.size(); ++i) {
    const Vec3& p = sa.points[i];
    const Vec3& dp = sa.dl[i];
    for (std::size_t j = 0; j < sb.points.size(); ++j) {
      const double d = (p - sb.points[j]).norm();
      const double w = dp.dot(sb.dl[j]);
      if (k == 0.0) {
        acc += w / d;
      } else {
        acc += w * Complex(std::cos(k * d), -std::sin(k * d)) / d;
      }
      mag += std::abs(w) / d;
    }
  }
  return {acc, mag};
}

template <typename Eval>
auto refine(const QuadratureOptions& opts, Eval eval) {
  auto [prev, scale] = eval(opts.initial_points_per_turn);
  double last_change = 0.0;
  for (int n = 2 * opts.initial_points_per_turn; n <= opts.max_points_per_turn; n *= 2) {
    auto [cur, s] = eval(n);
    const double change = std::abs(cur - prev);
    last_change = change / std::max(std::abs(cur), 1e-300);
    if (change <= opts.rel_tol * std::max(std::abs(cur), 1e-9 * s)) return std::make_pair(cur, n);
    prev = cur;
    scale = s;
  }
  std::ostringstream os;
  os << "mutual impedance quadrature did not converge (relative change " << last_change << " at "
     << opts.max_points_per_turn << " points per turn)";
  throw NumericalError(os.str());
}

}  // namespace

Complex mutual_impedance_integral(const CoilPose& a, const CoilPose& b, double f_hz, const QuadratureOptions& opts) {
  if (!(f_hz > 0.0)) throw DomainError("mutual_impedance_integral: frequency must be > 0");
  check_separation(a.geometry(), b.geometry());
  const double k = wavenumber(f_hz);
  auto [sum, n] = refine(opts, [&](int ppt) { return kernel_sum(a.sample(ppt, true), b.sample(ppt, true), k); });
  (void)n;
  return kJ * angular(f_hz) * mu0 / (4.0 * pi) * sum;
}

double neumann_mutual_inductance(const CoilPose& a, const CoilPose& b, const QuadratureOptions& opts) {
  check_separation(a.geometry(), b.geometry());
  auto [sum, n] = refine(opts, [&](int ppt) { return kernel_sum(a.sample(ppt, true), b.sample(ppt, true), 0.0); });
  (void)n;
  return mu0 / (4.0 * pi) * sum.real();
}

CouplingModel::CouplingModel(std::vector<CoilPose> coils, CouplingOptions options)
    : coils_(std::move(coils)), options_(options) {
  if (coils_.empty()) throw DomainError("CouplingModel: at least one coil required");
  const std::size_t n = coils_.size();
  pairs_.resize(n * (n - 1) / 2);
  std::size_t idx = 0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t q = m + 1; q < n; ++q, ++idx) pairs_[idx] = build_pair(m, q);
}

CouplingModel::CouplingModel(const CouplingModel& base, const std::vector<CoilPose>& extra)
    : coils_(base.coils_), options_(base.options_) {
  coils_.insert(coils_.end(), extra.begin(), extra.end());
  const std::size_t n = coils_.size();
  const std::size_t nb = base.coils_.size();
  pairs_.resize(n * (n - 1) / 2);
  std::size_t idx = 0;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t q = m + 1; q < n; ++q, ++idx)
      pairs_[idx] = q < nb ? base.pair(m, q) : build_pair(m, q);
}

CouplingModel::Pair CouplingModel::build_pair(std::size_t m, std::size_t q) const {
  const bool banded = options_.band_hi_hz > 0.0 && options_.band_hi_hz >= options_.band_lo_hz;
  const double k0 = banded ? wavenumber(0.5 * (options_.band_lo_hz + options_.band_hi_hz)) : 0.0;
  const double dk = banded ? wavenumber(0.5 * (options_.band_hi_hz - options_.band_lo_hz)) : 0.0;
  const CoilGeometry& gm = coils_[m].geometry();
  const CoilGeometry& gq = coils_[q].geometry();
  check_separation(gm, gq);
  Pair p;
  const double dist = (gm.center - gq.center).norm();
  const double diameter = 2.0 * std::max(gm.loop_radius, gq.loop_radius);
  if (dist > options_.use_dipole_beyond * diameter) {
    p.kind = PairKind::Dipole;
    return p;
  }
  const double dmax = dist + bounding_radius(gm) + bounding_radius(gq);
  const double x = dk * dmax;
  // beyond x ~ 8 the alternating series loses more than ~3 digits
  if (!banded || x > 8.0) {
    p.kind = PairKind::Direct;
    return p;
  }
  // Truncation: x^(N+1)/(N+1)! < 1e-15.
  int order = 1;
  double term = x;
  while (term > 1e-15 && order < 80) {
    ++order;
    term *= x / order;
  }
  p.kind = PairKind::Expanded;
  p.k0 = k0;
  p.max_dk = dk;
  const auto eval = [&](int ppt) {
    const CurveSamples sa = coils_[m].sample(ppt, true);
    const CurveSamples sb = coils_[q].sample(ppt, true);
    std::vector<Complex> mom(static_cast<std::size_t>(order) + 1, Complex(0.0));
    double mag = 0.0;
    for (std::size_t i = 0; i < sa.points.size(); ++i) {
      for (std::size_t j = 0; j < sb.points.size(); ++j) {
        const double d = (sa.points[i] - sb.points[j]).norm();
        const double w = sa.dl[i].dot(sb.dl[j]);
        mag += std::abs(w) / d;
        Complex t = w * Complex(std::cos(k0 * d), -std::sin(k0 * d)) / d;
        for (int o = 0; o <= order; ++o) {
          mom[static_cast<std::size_t>(o)] += t;
          t *= d / (o + 1);
        }
      }
    }
    return std::make_pair(mom, mag);
  };
  // Converge on the expansion evaluated at the band edges and center.
  const auto probe = [&](const std::vector<Complex>& mom) {
    Eigen::Vector3cd v;
    const double dks[3] = {-dk, 0.0, dk};
    for (int s = 0; s < 3; ++s) {
      Complex acc = 0.0;
      Complex pw = 1.0;
      for (const Complex& mo : mom) {
        acc += pw * mo;
        pw *= -kJ * dks[s];
      }
      v[s] = acc;
    }
    return v;
  };
  const QuadratureOptions& qo = options_.quadrature;
  auto [prev, prev_mag] = eval(qo.initial_points_per_turn);
  bool converged = false;
  for (int ppt = 2 * qo.initial_points_per_turn; ppt <= qo.max_points_per_turn; ppt *= 2) {
    auto [cur, mag] = eval(ppt);
    const Eigen::Vector3cd a = probe(prev);
    const Eigen::Vector3cd b = probe(cur);
    const double change = (a - b).cwiseAbs().maxCoeff();
    const double ref = std::max(b.cwiseAbs().minCoeff(), 1e-9 * mag);
    prev = std::move(cur);
    prev_mag = mag;
    if (change <= qo.rel_tol * ref) {
      converged = true;
      p.points_per_turn = ppt;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("mutual impedance quadrature did not converge for coil pair (" + std::to_string(m) +
                         ", " + std::to_string(q) + ")");
  }
  p.moments = std::move(prev);
  return p;
}

const CouplingModel::Pair& CouplingModel::pair(std::size_t m, std::size_t n) const {
  if (m > n) std::swap(m, n);
  const std::size_t size = coils_.size();
  const std::size_t idx = m * size - m * (m + 1) / 2 + (n - m - 1);
  return pairs_[idx];
}

bool CouplingModel::uses_integral(std::size_t m, std::size_t n) const { return pair(m, n).kind != PairKind::Dipole; }

Complex CouplingModel::mutual(std::size_t m, std::size_t n, double f_hz) const {
  const Pair& p = pair(m, n);
  switch (p.kind) {
    case PairKind::Dipole:
      return mutual_impedance_dipole(coils_[m].geometry(), coils_[n].geometry(), f_hz);
    case PairKind::Expanded: {
      const double dk = wavenumber(f_hz) - p.k0;
      if (std::abs(dk) <= p.max_dk * (1.0 + 1e-12)) {
        Complex acc = 0.0;
        Complex pw = 1.0;
        for (const Complex& mo : p.moments) {
          acc += pw * mo;
          pw *= -kJ * dk;
        }
        return kJ * angular(f_hz) * mu0 / (4.0 * pi) * acc;
      }
      [[fallthrough]];
    }
    case PairKind::Direct:
      break;
  }
  return mutual_impedance_integral(coils_[m], coils_[n], f_hz, options_.quadrature);
}

std::vector<CoilCircuit> CouplingModel::circuits(double f_hz) const {
  std::vector<CoilCircuit> out;
  out.reserve(coils_.size());
  for (const auto& c : coils_) out.push_back(coil_circuit(c.geometry(), f_hz));
  return out;
}

ComplexMatrix CouplingModel::bare_matrix(double f_hz) const {
  if (!(f_hz > 0.0)) throw DomainError("bare_matrix: frequency must be > 0");
  const auto n = static_cast<Eigen::Index>(coils_.size());
  ComplexMatrix z(n, n);
  const auto circ = circuits(f_hz);
  for (Eigen::Index m = 0; m < n; ++m) {
    z(m, m) = circ[static_cast<std::size_t>(m)].series_impedance();
    for (Eigen::Index q = m + 1; q < n; ++q) {
      const Complex zm = mutual(static_cast<std::size_t>(m), static_cast<std::size_t>(q), f_hz);
      z(m, q) = zm;
      z(q, m) = zm;
    }
  }
  return z;
}

ComplexMatrix CouplingModel::antenna_matrix(double f_hz) const {
  const ComplexMatrix zbar = bare_matrix(f_hz);
  const auto n = zbar.rows();
  ComplexVector yc(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    yc[m] = kJ * angular(f_hz) * self_capacitance(coils_[static_cast<std::size_t>(m)].geometry());
  }
  // (Zbar^-1 + Y_C)^-1 = (I + Zbar Y_C)^-1 Zbar
  ComplexMatrix lhs = ComplexMatrix::Identity(n, n) + zbar * yc.asDiagonal();
  ComplexMatrix za = linalg::solve(lhs, zbar, "antenna matrix (self-capacitance)");
  return 0.5 * (za + za.transpose());
}

ComplexMatrix assemble_antenna_matrix(const std::vector<CoilPose>& coils, double f_hz, double use_dipole_beyond) {
  CouplingOptions opts;
  opts.use_dipole_beyond = use_dipole_beyond;
  return CouplingModel(coils, opts).antenna_matrix(f_hz);
}

ComplexMatrix reduce_passive_relays(const ComplexMatrix& z_full, Eigen::Index n_active, const ComplexMatrix& z_term) {
  const Eigen::Index n = z_full.rows();
  if (z_full.cols() != n || n_active < 0 || n_active > n) {
    throw DomainError("reduce_passive_relays: bad partition");
  }
  const Eigen::Index nr = n - n_active;
  if (z_term.rows() != nr || z_term.cols() != nr) {
    throw DomainError("reduce_passive_relays: termination size does not match relay block");
  }
  if (nr == 0) return z_full;
  const ComplexMatrix z_to = z_full.block(n_active, 0, nr, n_active);
  const ComplexMatrix z_rel = z_full.block(n_active, n_active, nr, nr) + z_term;
  const ComplexMatrix x = linalg::solve(z_rel, z_to, "relay reduction");
  ComplexMatrix out = z_full.topLeftCorner(n_active, n_active) - z_to.transpose() * x;
  return out;
}

}  // namespace misim
