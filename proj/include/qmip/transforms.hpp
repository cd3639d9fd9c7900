#pragma once

#include <optional>
#include <utility>

#include "qmip/protocol.hpp"

namespace qmip {

// One verifier turn of the oracle-call form: a block of qubit swaps, an
// optional action on the original verifier's reach (V plus all message
// registers, the leading qubits), then another swap block. Swap pairs are
// global qubit indices and are applied in list order.
struct QocTurn {
    std::vector<std::pair<int, int>> pre_swaps;
    std::optional<Turn> action;
    std::vector<std::pair<int, int>> post_swaps;
};

// A k-prover protocol rewritten so that a single party with no memory of its
// own answers every query: the verifier keeps every register (V, the
// messages, and each prover's private space, padded to m*q_M qubits) and
// shuttles one prover's registers at a time into the oracle interface
// (registers OM, OP) between calls.
struct OracleCircuitSpec {
    int k = 1;
    int m = 1;
    int q_V = 1;
    int q_M = 0;
    int output_qubit = 0;

    int q_P_padded() const { return m * q_M; }
    int q_V_qoc() const { return q_V + k * (m + 1) * q_M; }
    int q_O_qoc() const { return (m + 1) * q_M; }
    int oracle_calls() const { return k * ((m + 1) / 2); }

    // V, M1..Mk, P1..Pk (padded), OM, OP.
    RegisterLayout layout() const;
    std::vector<int> action_qubits() const;  // V + M1..Mk, the leading block
    std::vector<int> oracle_qubits() const;  // OM + OP

    std::vector<QocTurn> turns;  // oracle_calls() + 1 of them
};

// Rewrites the protocol into the oracle-call form. The provers' private
// registers must fit the padded width m*q_M (rebuild them with the
// compression pipeline first if they do not), and prior entanglement has no
// counterpart on the oracle side.
OracleCircuitSpec to_oracle_circuit(const ProtocolSpec& spec, const VerifierProgram& verifier);

// Oracle call (j-1)k + i answers prover i's round-j turn; the matrix is the
// same unitary read on OM (x) OP, padded with an identity on the extra
// private qubits.
std::vector<ComplexMatrix> oracle_from_provers(const ProtocolSpec& spec,
                                               const ProverStrategy& provers);

// Inverse re-addressing. The returned turns act at the padded width, so the
// matching spec has q_P = m*q_M.
ProverStrategy provers_from_oracle(const ProtocolSpec& spec,
                                   const std::vector<ComplexMatrix>& oracles);

// Runs the oracle-call form and returns its acceptance probability.
double run_oracle_circuit(const OracleCircuitSpec& qoc, const std::vector<ComplexMatrix>& oracles);

// The oracle-call form is itself a one-prover protocol: the whole oracle
// interface becomes the message register and the prover keeps nothing.
struct LoweredProtocol {
    ProtocolSpec spec;
    VerifierProgram verifier;
    ProverStrategy provers;
};
LoweredProtocol to_protocol(const OracleCircuitSpec& qoc, const std::vector<ComplexMatrix>& oracles);

// A one-round two-prover game with classical messages: the referee draws a
// tape value v with questions (q1, q2) attached, and accepts answer pair
// (a1, a2) according to a truth table.
struct ClassicalTwoProverGame {
    int tape_size = 1;
    int question_sizes[2] = {1, 1};
    int answer_sizes[2] = {1, 1};
    std::vector<double> probs;           // [v][q1][q2], row-major
    std::vector<uint8_t> accept_table;   // [v][q1][q2][a1][a2], row-major

    double probability(int v, int q1, int q2) const;
    bool accepts(int v, int q1, int q2, int a1, int a2) const;

    // Throws on negative probabilities or a total off 1 by more than 1e-12.
    void check() const;
};

struct EmbeddedGame {
    ProtocolSpec spec;        // k = 2, m = 2
    VerifierProgram verifier;
    int q_M = 0;              // message width, fits every alphabet
    int tape_qubits = 0;      // width of the referee's tape register
};

struct EmbedOptions {
    int q_ent = 0;
    int q_P = -1;  // default max(q_M, q_ent)
};

// Turns the game into a two-prover protocol: the first verifier turn
// prepares sum_v sqrt(p) |v>|q1>|q2>|0>|0>|q1>|q2> across its tape, question,
// answer, and message registers; the second copies the answers back and
// flips the output qubit wherever the truth table accepts. Encodings outside
// the alphabets never accept.
EmbeddedGame embed_classical_game(const ClassicalTwoProverGame& game,
                                  const EmbedOptions& options = {});

// Maximum acceptance over deterministic answer-function pairs, by exhaustive
// search. Alphabets above size 4 are refused.
double classical_value(const ClassicalTwoProverGame& game);

}  // namespace qmip
