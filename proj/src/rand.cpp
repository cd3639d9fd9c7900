#include "qmip/rand.hpp"

#include <cmath>

#include <Eigen/QR>

namespace qmip {

double Rng::uniform() {
    // 53 random bits into [0,1), the usual double mantissa construction.
    return double(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

Complex Rng::complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im);
}

ComplexMatrix random_unitary(int dim, Rng& rng) {
    ComplexMatrix g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_gaussian();
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the gauge: divide out the phases of R's diagonal so the result is
    // Haar-distributed rather than biased by QR's sign conventions.
    for (int c = 0; c < dim; ++c) {
        Complex d = r(c, c);
        if (std::abs(d) > 0.0) q.col(c) *= d / std::abs(d);
    }
    return q;
}

ComplexVector random_state(int dim, Rng& rng) {
    ComplexVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
    double n = v.norm();
    while (n == 0.0) {
        for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
        n = v.norm();
    }
    return v / n;
}

ComplexMatrix random_hermitian(int dim, Rng& rng) {
    ComplexMatrix g(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) g(r, c) = rng.complex_gaussian();
    return (g + g.adjoint()) / 2.0;
}

ComplexMatrix random_density(int dim, int rank, Rng& rng) {
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (int k = 0; k < rank; ++k) {
        ComplexVector v = random_state(dim, rng);
        rho += v * v.adjoint();
    }
    rho /= Complex(rank, 0.0);
    // Symmetrize away the last-bit asymmetry of the sum.
    return (rho + rho.adjoint()) / 2.0;
}

}  // namespace qmip
