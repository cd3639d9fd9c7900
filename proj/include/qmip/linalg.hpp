#pragma once

#include <complex>

#include <Eigen/Dense>

#include "qmip/errors.hpp"

namespace qmip {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Structural comparison / rank tolerances used throughout the library.
// Structural checks (unitarity, Hermiticity, norms) use 1e-10; rank
// decisions are relative to the largest singular value at 1e-8.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kRankTol = 1e-8;

// Global dimension cap, expressed in qubits. Default 24 (2^24 amplitudes,
// ~256 MB of complex doubles); override with the QMIP_MAX_QUBITS environment
// variable. Enforced where dimensions grow: tensor products and state
// construction.
int max_qubits();

// Throws CapacityError if dim > 2^max_qubits(). `what` names the operation
// for the error message.
void check_dimension_cap(std::ptrdiff_t dim, const char* what);

struct EigenDecomposition {
    RealVector eigenvalues;      // descending
    ComplexMatrix eigenvectors;  // columns, orthonormal, aligned with eigenvalues
};

struct SingularValueDecomposition {
    ComplexMatrix left;   // columns = left singular vectors
    RealVector singulars; // descending, nonnegative
    ComplexMatrix right;  // columns = right singular vectors

    // left * diag(singulars) * right^dagger
    ComplexMatrix reconstruct() const;
};

// Kronecker product. Entry ((i1,i2),(j1,j2)) = a(i1,j1) * b(i2,j2).
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b);

// Checked matrix product; throws ShapeError on inner-dimension mismatch.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);

// Conjugate transpose.
ComplexMatrix adjoint(const ComplexMatrix& a);

// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
// Throws ContractError if `a` is not square or not Hermitian within tol.
EigenDecomposition hermitian_eig(const ComplexMatrix& a, double tol = kStructuralTol);

// Thin SVD with descending singular values.
SingularValueDecomposition svd(const ComplexMatrix& a);

// Largest singular value (the l2-induced operator norm).
double operator_norm(const ComplexMatrix& a);

// True iff ||a a^dagger - I||_max <= tol. Throws ShapeError for non-square a.
bool is_unitary(const ComplexMatrix& a, double tol = kStructuralTol);

// Nearest unitary to `a` in Frobenius norm (the unitary polar factor).
ComplexMatrix polar_unitary(const ComplexMatrix& a);

// Given a d x r matrix with orthonormal columns (r <= d), returns a
// d x (d-r) matrix whose columns extend them to an orthonormal basis.
ComplexMatrix orthonormal_completion(const ComplexMatrix& isometry);

// Multiplies v by the phase that makes its first entry of magnitude > 1e-9
// real positive. Zero vectors are returned unchanged. This is the global
// phase convention for synthesized states and decomposition columns.
ComplexVector phase_normalized(const ComplexVector& v);

}  // namespace qmip
