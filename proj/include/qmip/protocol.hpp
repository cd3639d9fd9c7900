#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qmip/states.hpp"

namespace qmip {

// Thrown for malformed gate applications (bad target indices, wrong matrix
// size on an explicit-unitary entry).
struct GateError : Error {
    using Error::Error;
};

enum class GateKind { Hadamard, SqrtZ, Toffoli, Unitary };

struct Gate {
    GateKind kind = GateKind::Hadamard;
    std::vector<int> targets;  // local qubit indices within the turn's space
    ComplexMatrix matrix;      // explicit-unitary entries only

    static Gate hadamard(int q) { return {GateKind::Hadamard, {q}, {}}; }
    static Gate sqrt_z(int q) { return {GateKind::SqrtZ, {q}, {}}; }
    static Gate toffoli(int c1, int c2, int t) { return {GateKind::Toffoli, {c1, c2, t}, {}}; }
    static Gate unitary(std::vector<int> targets, ComplexMatrix m);

    // The gate's own matrix (2, 2, 8, or the explicit one).
    ComplexMatrix gate_matrix() const;
};

struct GateList {
    std::vector<Gate> gates;
};

// A circuit turn: either a gate list or one explicit matrix over the whole
// turn space. Gate lists are the only practical form once the turn space
// grows past a dozen qubits.
using Turn = std::variant<GateList, ComplexMatrix>;

// Full matrix of a gate list over 2^total_qubits dimensions.
ComplexMatrix compile_gates(const GateList& g, int total_qubits);

// Applies a gate list to the state, mapping each gate's local targets
// through `turn_qubits` (the global qubits the turn acts on).
void apply_gate_list(PureState& state, const GateList& g, const std::vector<int>& turn_qubits);

// Applies a turn of either form on the given global qubits.
void apply_turn(PureState& state, const Turn& turn, const std::vector<int>& turn_qubits);

// A k-prover m-message protocol shape. Registers are laid out V, M1..Mk,
// P1..Pk; message registers hold q_M qubits, prover private registers q_P,
// and the first q_ent qubits of each P_i may carry prior entanglement.
struct ProtocolSpec {
    int k = 1;
    int m = 1;
    int q_V = 1;
    int q_M = 1;
    int q_P = 0;
    int q_ent = 0;
    int output_qubit = 0;  // index into V

    RegisterLayout layout() const;

    int verifier_turn_count() const { return m / 2 + 1; }          // floor(m/2 + 1)
    int prover_turn_count() const { return (m + 1) / 2; }          // floor(m/2 + 1/2)
    int total_qubits() const { return q_V + k * (q_M + q_P); }

    std::string message_register(int i) const;  // "M1".."Mk", 1-based
    std::string prover_register(int i) const;   // "P1".."Pk"

    // Global qubits of V and all message registers (the verifier's reach).
    std::vector<int> verifier_qubits() const;
    // Global qubits of M_i followed by P_i (prover i's reach), 1-based i.
    std::vector<int> prover_qubits(int i) const;
};

struct VerifierProgram {
    std::vector<Turn> turns;
};

struct ProverStrategy {
    // turns[i][j] = unitary of prover i+1 in round j+1, on M_i (x) P_i.
    std::vector<std::vector<ComplexMatrix>> turns;
};

struct PriorEntanglement {
    // Pure state over the k*q_ent designated qubits (the first q_ent of
    // each P_i, concatenated in prover order), or empty when absent.
    ComplexVector state;

    bool absent() const { return state.size() == 0; }

    static PriorEntanglement none() { return {}; }
    static PriorEntanglement of(ComplexVector v) { return {std::move(v)}; }

    // k-party generalization of the EPR pair: sum_i |i..i> / sqrt(2^q_ent).
    static PriorEntanglement maximally_entangled(int k, int q_ent);
};

// Checks every structural invariant of the protocol description and returns
// one message per violation; an empty report means the tuple is runnable.
std::vector<std::string> validate_protocol(const ProtocolSpec& spec,
                                           const VerifierProgram& verifier,
                                           const ProverStrategy& provers,
                                           const PriorEntanglement& prior = {});

// |init>: designated qubits carry the prior, everything else |0>.
PureState initial_state(const ProtocolSpec& spec, const PriorEntanglement& prior);

struct RunOptions {
    // Application order of provers within a round (1-based indices,
    // a permutation of 1..k). Empty = 1..k. The order has no observable
    // effect; the knob exists so tests can demonstrate that.
    std::vector<int> prover_order;
    // Record the state after every verifier turn.
    bool snapshot_after_verifier_turns = false;
};

struct RunResult {
    PureState final_state;
    double acceptance = 0.0;
    // Norm after every schedule step (prover rounds count as one step each).
    std::vector<double> step_norms;
    std::vector<PureState> verifier_snapshots;
};

// Runs the protocol on its schedule: for even m the verifier opens
// (V1, round, V2, round, ...), for odd m a prover round opens (round, V1,
// round, V2, ...); both end on a verifier turn. Acceptance is the
// probability of reading |1> on the output qubit afterwards.
RunResult run_protocol(const ProtocolSpec& spec, const VerifierProgram& verifier,
                       const ProverStrategy& provers, const PriorEntanglement& prior = {},
                       const RunOptions& options = {});

}  // namespace qmip
