#pragma once

#include "qmip/protocol.hpp"

namespace qmip {

// One round of a prover-memory compression. `phi`/`psi` are the states of
// the unmodified protocol immediately before and after the prover's turn;
// `phi_capped`/`psi_capped` are their counterparts on the replacement track.
// `replacement` is the unitary the new prover applies in this round and
// `realignment` (multi-prover pipelines only) is the private-register
// unitary carrying the capped after-state back onto the original one.
struct CompressionRound {
    PureState phi;
    PureState psi;
    PureState phi_capped;
    PureState psi_capped;
    ComplexMatrix replacement;
    ComplexMatrix realignment;
    int schmidt_rank = 0;  // rank of psi across the private-register cut
};

struct CompressionTrace {
    int prover = 1;  // 1-based index of the prover that was rebuilt
    int budget = 0;  // private-qubit budget the pipeline aims for
    std::vector<CompressionRound> rounds;
};

// A rebuilt prover. `turns` act on M_i (x) P_i with the private register
// resized to `q_P` qubits. The single-prover pipeline leaves an
// already-fitting prover untouched (trace carries no rounds); the k-prover
// pipeline always rebuilds at exactly its budget.
struct CompressedProver {
    std::vector<ComplexMatrix> turns;
    int q_P = 0;
    // |acceptance with this prover swapped in - acceptance of the input|.
    double acceptance_delta = 0.0;
    CompressionTrace trace;
};

// Rebuilds the only prover of a single-prover protocol so that it needs at
// most q_V + q_M private qubits: each round's after-state is re-purified
// into the small register and a state-synthesis unitary bridges the two
// purifications. Acceptance is preserved exactly up to numerical error.
CompressedProver compress_single_prover(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                        const std::vector<ComplexMatrix>& prover_turns,
                                        double tol = kStructuralTol);

// Rebuilds prover `prover_index` (1-based) of a k-prover protocol so that it
// uses exactly q_ent + 2 * rounds * q_M private qubits (narrower inputs are
// padded first, wider ones shrunk). Round j's after-state is confined to
// q_ent + 2j*q_M private qubits (the growth bound makes this feasible), and
// the replacement turn is synthesized between the confined states. Other
// provers are untouched.
CompressedProver compress_prover(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                 const ProverStrategy& provers, int prover_index,
                                 const PriorEntanglement& prior, double tol = kStructuralTol);

struct CompressedProtocol {
    ProtocolSpec spec;        // q_P shrunk to the common budget
    ProverStrategy provers;   // every prover rebuilt at the new width
    std::vector<CompressedProver> per_prover;
    double original_acceptance = 0.0;
    double compressed_acceptance = 0.0;
};

// Applies compress_prover to every prover in index order, re-deriving each
// against the tuple already containing the previous replacements, then
// shrinks the shared private width to the budget.
CompressedProtocol compress_all_provers(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                        const ProverStrategy& provers,
                                        const PriorEntanglement& prior, double tol = kStructuralTol);

struct EquivalenceReport {
    double acceptance_a = 0.0;
    double acceptance_b = 0.0;
    // After each verifier turn, operator norm of the difference between the
    // two runs' reduced states on V and the message registers.
    std::vector<double> view_gaps;
};

// Runs the protocol once with each strategy (private widths are inferred
// from the turn matrices, so the two sides may differ) and reports both
// acceptance probabilities plus the verifier's view gap after every turn.
EquivalenceReport verify_equivalence(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                     const ProverStrategy& provers_a,
                                     const ProverStrategy& provers_b,
                                     const PriorEntanglement& prior = {});

}  // namespace qmip
