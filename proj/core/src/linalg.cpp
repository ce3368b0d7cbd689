#include "misim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace misim::linalg {

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b, std::string_view stage) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    throw NumericalError(std::string(stage) + ": dimension mismatch in linear solve");
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 1e-15)) {
    std::ostringstream os;
    os << stage << ": singular matrix (reciprocal condition " << rc << ")";
    throw NumericalError(os.str());
  }
  return lu.solve(b);
}

ComplexMatrix inverse(const ComplexMatrix& a, std::string_view stage) {
  return solve(a, ComplexMatrix::Identity(a.rows(), a.cols()), stage);
}

double rcond(const ComplexMatrix& a) { return Eigen::PartialPivLU<ComplexMatrix>(a).rcond(); }

namespace {

template <typename Fn>
RealMatrix spd_function(const RealMatrix& a, std::string_view what, Fn fn) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (a + a.transpose()));
  const RealVector& ev = es.eigenvalues();
  if (ev.size() > 0 && !(ev.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << what << ": matrix is not positive definite (min eigenvalue " << ev.minCoeff() << ")";
    throw DomainError(os.str());
  }
  RealVector mapped = ev.unaryExpr(fn);
  return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

RealMatrix sqrtm_spd(const RealMatrix& a, std::string_view what) {
  return spd_function(a, what, [](double x) { return std::sqrt(x); });
}

RealMatrix inv_sqrtm_spd(const RealMatrix& a, std::string_view what) {
  return spd_function(a, what, [](double x) { return 1.0 / std::sqrt(x); });
}

ComplexMatrix sqrtm_hpd(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix inv_sqrtm_hpd(const ComplexMatrix& a, std::string_view what) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a));
  const RealVector& ev = es.eigenvalues();
  if (ev.size() > 0 && !(ev.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << what << ": matrix is not positive definite (min eigenvalue " << ev.minCoeff() << ")";
    throw NumericalError(os.str());
  }
  RealVector inv = ev.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

double symmetry_error(const ComplexMatrix& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

double min_real_part_eigenvalue_ratio(const ComplexMatrix& a) {
  RealMatrix re = a.real();
  re = 0.5 * (re + re.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(re, Eigen::EigenvaluesOnly);
  const double tr = std::abs(re.trace());
  if (tr == 0.0) return 0.0;
  return es.eigenvalues().minCoeff() / tr;
}

ComplexMatrix repair_psd(const ComplexMatrix& a, double rel_tol, std::string_view what) {
  ComplexMatrix h = hermitian_part(a);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  RealVector ev = es.eigenvalues();
  const double tr = std::abs(h.trace().real());
  if (ev.size() == 0) return h;
  if (ev.minCoeff() >= 0.0) return h;
  if (ev.minCoeff() < -rel_tol * tr) {
    std::ostringstream os;
    os << what << ": matrix is not PSD (min eigenvalue " << ev.minCoeff() << ", trace " << tr << ")";
    throw NumericalError(os.str());
  }
  ev = ev.cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace misim::linalg
