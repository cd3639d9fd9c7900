#pragma once

#include <cstdint>
#include <random>

#include "qmip/linalg.hpp"

namespace qmip {

// Deterministic random source for tests and the optimizer. std::mt19937_64
// produces an identical stream on every platform; the Gaussian transform is
// done by hand (Box-Muller) because std::normal_distribution is allowed to
// differ between standard libraries, which would break cross-platform
// reproducibility of seeded runs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1).
    double uniform();

    // Standard normal via Box-Muller.
    double gaussian();

    // Standard complex normal (independent N(0,1/2)-ish real/imag parts;
    // the overall scale is irrelevant for Haar sampling).
    Complex complex_gaussian();

    std::uint64_t integer() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Haar-distributed unitary: QR of a complex Gaussian matrix with the R
// diagonal's phases divided out.
ComplexMatrix random_unitary(int dim, Rng& rng);

// Uniform random unit vector.
ComplexVector random_state(int dim, Rng& rng);

// Random Hermitian matrix (Gaussian entries, Hermitized).
ComplexMatrix random_hermitian(int dim, Rng& rng);

// Random density matrix of rank r (mixture of r Gaussian pure states).
ComplexMatrix random_density(int dim, int rank, Rng& rng);

}  // namespace qmip
