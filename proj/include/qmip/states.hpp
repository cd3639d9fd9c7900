#pragma once

#include <string>
#include <vector>

#include "qmip/linalg.hpp"
#include "qmip/registers.hpp"

namespace qmip {

// A pure state over a register layout. Amplitude index bit order follows the
// layout: qubit 0 is the most significant bit.
struct PureState {
    RegisterLayout layout;
    ComplexVector amplitudes;

    PureState(RegisterLayout lay, ComplexVector amps);

    // |0...0> over the layout.
    static PureState zero(RegisterLayout lay);

    // Computational basis state with the given amplitude index.
    static PureState basis(RegisterLayout lay, std::uint64_t index);
};

struct DensityMatrix {
    RegisterLayout layout;
    ComplexMatrix matrix;

    DensityMatrix(RegisterLayout lay, ComplexMatrix m);
};

struct SchmidtDecomposition {
    RealVector coefficients;     // descending, truncated at numerical noise
    ComplexMatrix left_vectors;  // columns, over the left cut's index space
    ComplexMatrix right_vectors; // columns, over the complement's index space
    int rank = 0;                // coefficients above rank_tol * coefficients(0)
    std::vector<int> left_qubits;   // global indices, most significant first
    std::vector<int> right_qubits;
};

// ---- Subsystem addressing ----------------------------------------------

// Applies a unitary on the listed global qubits (most significant local bit
// = targets[0]) to the whole state, extending by identity elsewhere.
void apply_unitary_in_place(PureState& state, const std::vector<int>& targets,
                            const ComplexMatrix& u);
PureState apply_unitary(PureState state, const std::vector<int>& targets,
                        const ComplexMatrix& u);

// Reshapes the amplitudes into a matrix with rows indexed by `row_qubits`
// and columns by the remaining qubits (both in their global order).
ComplexMatrix amplitude_matrix(const PureState& state, const std::vector<int>& row_qubits);

// ---- Operations ----------------------------------------------------------

// Traces out everything not in `keep`. Surviving registers keep their
// relative order. Works for pure and mixed inputs.
DensityMatrix partial_trace(const PureState& state, const std::vector<std::string>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);

SchmidtDecomposition schmidt_decompose(const PureState& state,
                                       const std::vector<std::string>& left,
                                       double rank_tol = kRankTol);

/// Schmidt rank across (left | rest): the bipartite entanglement measure.
int ent2(const PureState& state, const std::vector<std::string>& left,
         double rank_tol = kRankTol);

// Constructive upper bound on the tripartite term count: Schmidt-decompose
// across (parts[0] | parts[1]+parts[2]) and then each right vector across
// (parts[1] | parts[2]), counting surviving coefficient products. This is an
// upper bound, not the exact three-party minimum.
int ent3_upper_bound(const PureState& state,
                     const std::vector<std::vector<std::string>>& parts,
                     double rank_tol = kRankTol);

// Purification: appends a register `ancilla_name` of the same dimension as
// rho's space and returns sum_i sqrt(lambda_i) |v_i> |i>, eigenvectors
// phase-normalized and eigenvalues descending.
PureState purify(const DensityMatrix& rho, const std::string& ancilla_name);

// Unitary U on part2 with (I (x) U)|phi> = |psi>, which exists whenever the
// two states have equal reduced states on the complement of part2 (checked
// within tol; the operator-norm gap is reported on failure). Row/column
// order of U follows part2's global qubit order.
ComplexMatrix uhlmann_unitary(const PureState& phi, const PureState& psi,
                              const std::vector<std::string>& part2,
                              double tol = kStructuralTol);

// Rewrites the state so the named subsystem's support lives on its first
// budget_qubits (the rest forced to |0>), preserving the reduced state on
// the complement. Possible whenever 2^budget_qubits covers the Schmidt rank
// across that cut; otherwise throws CapacityError reporting the rank.
PureState compress_subsystem(const PureState& psi, const std::string& subsystem,
                             int budget_qubits, double rank_tol = kRankTol);

// Probability that measuring the given global qubit yields |1>.
double measure_output_qubit(const PureState& state, int qubit);

// ---- Register reshaping helpers ------------------------------------------

// Shrinks register `name` to its first new_count qubits. The dropped
// trailing qubits must carry no support (leak above tol -> ContractError).
PureState restrict_register(const PureState& state, const std::string& name, int new_count,
                            double tol = 1e-9);

// Grows register `name` to new_count qubits; the added trailing qubits
// start in |0>.
PureState embed_register(const PureState& state, const std::string& name, int new_count);

// l2 norm of the amplitudes in which any qubit of `name` beyond the first
// `prefix` qubits is 1 (diagnostic for support confinement).
double support_leak(const PureState& state, const std::string& name, int prefix);

}  // namespace qmip
