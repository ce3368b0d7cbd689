#pragma once

#include <string_view>

#include "misim/types.hpp"

namespace misim::linalg {

/// Solves A X = B with partial-pivot LU, throwing NumericalError (tagged with
/// `stage`) when A is singular to working precision.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b, std::string_view stage);
ComplexMatrix inverse(const ComplexMatrix& a, std::string_view stage);

/// Reciprocal condition estimate (1-norm, via the LU factors).
double rcond(const ComplexMatrix& a);

/// Principal square root of a symmetric positive definite real matrix.
RealMatrix sqrtm_spd(const RealMatrix& a, std::string_view what);
/// Inverse principal square root of a symmetric positive definite real matrix.
RealMatrix inv_sqrtm_spd(const RealMatrix& a, std::string_view what);

/// Hermitian PSD square root / inverse square root (eigen-decomposition based).
ComplexMatrix sqrtm_hpd(const ComplexMatrix& a);
ComplexMatrix inv_sqrtm_hpd(const ComplexMatrix& a, std::string_view what);

inline ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// max |A - A^T| / max |A|; zero for complex symmetric matrices.
double symmetry_error(const ComplexMatrix& a);

/// Smallest eigenvalue of the Hermitian part of Re{A} scaled by |trace|.
double min_real_part_eigenvalue_ratio(const ComplexMatrix& a);

/// Clips eigenvalues in [-tol*trace, 0) to zero; larger negative eigenvalues
/// throw NumericalError.
ComplexMatrix repair_psd(const ComplexMatrix& a, double rel_tol, std::string_view what);

/// Block-diagonal assembly helper for diagonal matrices built from a vector.
inline ComplexMatrix diag(const ComplexVector& v) { return v.asDiagonal(); }

}  // namespace misim::linalg
