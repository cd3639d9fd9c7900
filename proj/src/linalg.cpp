#include "qmip/linalg.hpp"

#include <cstdlib>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace qmip {

int max_qubits() {
    static const int cap = [] {
        if (const char* env = std::getenv("QMIP_MAX_QUBITS")) {
            int v = std::atoi(env);
            if (v > 0) return v;
        }
        return 24;
    }();
    return cap;
}

void check_dimension_cap(std::ptrdiff_t dim, const char* what) {
    const std::ptrdiff_t limit = std::ptrdiff_t(1) << max_qubits();
    if (dim > limit) {
        throw CapacityError(std::string(what) + ": dimension " + std::to_string(dim) +
                            " exceeds cap 2^" + std::to_string(max_qubits()));
    }
}

ComplexMatrix SingularValueDecomposition::reconstruct() const {
    return left * singulars.asDiagonal() * right.adjoint();
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_dimension_cap(a.rows() * b.rows(), "tensor_product");
    check_dimension_cap(a.cols() * b.cols(), "tensor_product");
    return Eigen::kroneckerProduct(a, b);
}

ComplexVector tensor_product(const ComplexVector& a, const ComplexVector& b) {
    check_dimension_cap(a.size() * b.size(), "tensor_product");
    ComplexVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) {
        throw ShapeError("multiply: inner dimensions " + std::to_string(a.cols()) + " and " +
                         std::to_string(b.rows()) + " do not match");
    }
    return a * b;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

EigenDecomposition hermitian_eig(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols())
        throw ContractError("hermitian_eig: matrix is not square");
    const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (dev > tol) {
        throw ContractError("hermitian_eig: input deviates from Hermitian by " +
                            std::to_string(dev));
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver((a + a.adjoint()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw NumericError("hermitian_eig: eigensolver failed to converge");
    // Eigen returns eigenvalues ascending; flip to descending.
    EigenDecomposition dec;
    const Eigen::Index n = a.rows();
    dec.eigenvalues = solver.eigenvalues().reverse();
    dec.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        dec.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    return dec;
}

SingularValueDecomposition svd(const ComplexMatrix& a) {
    Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (solver.info() != Eigen::Success)
        throw NumericError("svd: decomposition failed to converge");
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double operator_norm(const ComplexMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> solver(a);
    return solver.singularValues()(0);
}

bool is_unitary(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols())
        throw ShapeError("is_unitary: matrix is not square");
    ComplexMatrix gram = a * a.adjoint();
    gram.diagonal().array() -= 1.0;
    return gram.cwiseAbs().maxCoeff() <= tol;
}

ComplexMatrix polar_unitary(const ComplexMatrix& a) {
    if (a.rows() != a.cols())
        throw ShapeError("polar_unitary: matrix is not square");
    Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return solver.matrixU() * solver.matrixV().adjoint();
}

ComplexMatrix orthonormal_completion(const ComplexMatrix& isometry) {
    const Eigen::Index d = isometry.rows();
    const Eigen::Index r = isometry.cols();
    if (r > d)
        throw ShapeError("orthonormal_completion: more columns than rows");
    if (r == d) return ComplexMatrix(d, 0);
    // Project the standard basis onto the orthogonal complement and keep an
    // orthonormal spanning set of the result.
    ComplexMatrix residual = ComplexMatrix::Identity(d, d) - isometry * isometry.adjoint();
    Eigen::JacobiSVD<ComplexMatrix> solver(residual, Eigen::ComputeFullU);
    // The residual is a projector of rank d-r; its singular vectors for
    // singular value 1 (the leading ones) span the complement.
    return solver.matrixU().leftCols(d - r).eval();
}

ComplexVector phase_normalized(const ComplexVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-9) {
            Complex phase = std::abs(v(i)) / v(i);
            return v * phase;
        }
    }
    return v;
}

}  // namespace qmip
