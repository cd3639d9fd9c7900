#include "qmip/transforms.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace qmip {
namespace {

int ceil_log2(int n) {
    int bits = 0;
    while ((1 << bits) < n) {
        ++bits;
    }
    return bits;
}

ComplexMatrix swap_gate() {
    ComplexMatrix s = ComplexMatrix::Zero(4, 4);
    s(0, 0) = 1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 3) = 1.0;
    return s;
}

ComplexMatrix cnot_gate() {
    ComplexMatrix c = ComplexMatrix::Identity(4, 4);
    c(2, 2) = 0.0;
    c(3, 3) = 0.0;
    c(2, 3) = 1.0;
    c(3, 2) = 1.0;
    return c;
}

}  // namespace

RegisterLayout OracleCircuitSpec::layout() const {
    RegisterLayout l;
    l.add("V", q_V);
    for (int i = 1; i <= k; ++i) {
        l.add("M" + std::to_string(i), q_M);
    }
    for (int i = 1; i <= k; ++i) {
        l.add("P" + std::to_string(i), q_P_padded());
    }
    l.add("OM", q_M);
    l.add("OP", q_P_padded());
    return l;
}

std::vector<int> OracleCircuitSpec::action_qubits() const {
    std::vector<int> q(static_cast<size_t>(q_V + k * q_M));
    std::iota(q.begin(), q.end(), 0);
    return q;
}

std::vector<int> OracleCircuitSpec::oracle_qubits() const {
    const RegisterLayout l = layout();
    std::vector<int> q = l.qubits_of("OM");
    const std::vector<int> p = l.qubits_of("OP");
    q.insert(q.end(), p.begin(), p.end());
    return q;
}

namespace {

// Swaps prover i's message and (padded) private registers with the oracle
// interface, qubit by qubit.
std::vector<std::pair<int, int>> swap_block(const OracleCircuitSpec& qoc, int i) {
    const RegisterLayout l = qoc.layout();
    std::vector<int> own = l.qubits_of("M" + std::to_string(i));
    {
        const std::vector<int> p = l.qubits_of("P" + std::to_string(i));
        own.insert(own.end(), p.begin(), p.end());
    }
    const std::vector<int> interface_qubits = qoc.oracle_qubits();
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(own.size());
    for (size_t q = 0; q < own.size(); ++q) {
        pairs.emplace_back(own[q], interface_qubits[q]);
    }
    return pairs;
}

}  // namespace

OracleCircuitSpec to_oracle_circuit(const ProtocolSpec& spec, const VerifierProgram& verifier) {
    if (spec.q_ent != 0) {
        throw ContractError(
            "unsupported transform: prior entanglement has no oracle-side counterpart");
    }
    OracleCircuitSpec qoc;
    qoc.k = spec.k;
    qoc.m = spec.m;
    qoc.q_V = spec.q_V;
    qoc.q_M = spec.q_M;
    qoc.output_qubit = spec.output_qubit;
    if (spec.q_P > qoc.q_P_padded()) {
        std::ostringstream os;
        os << "private registers (" << spec.q_P << " qubits) exceed the oracle interface ("
           << qoc.q_P_padded() << "); rebuild the provers with the compression pipeline first";
        throw ContractError(os.str());
    }
    if (verifier.turns.size() != static_cast<size_t>(spec.verifier_turn_count())) {
        throw ShapeError("verifier turn count does not match the schedule");
    }

    const bool even = spec.m % 2 == 0;
    const int calls = qoc.oracle_calls();
    for (int t = 1; t <= calls; ++t) {
        const int j = (t - 1) / spec.k + 1;
        const int i = (t - 1) % spec.k + 1;
        QocTurn turn;
        if (t == 1) {
            if (even) {
                turn.action = verifier.turns[0];
            }
            turn.post_swaps = swap_block(qoc, 1);
        } else if (i == 1) {
            // A fresh round: park prover k's registers, let the verifier
            // act, hand prover 1's registers to the interface.
            turn.pre_swaps = swap_block(qoc, spec.k);
            turn.action = verifier.turns[static_cast<size_t>(even ? j - 1 : j - 2)];
            turn.post_swaps = swap_block(qoc, 1);
        } else {
            turn.pre_swaps = swap_block(qoc, i - 1);
            const auto next = swap_block(qoc, i);
            turn.pre_swaps.insert(turn.pre_swaps.end(), next.begin(), next.end());
        }
        qoc.turns.push_back(std::move(turn));
    }
    QocTurn last;
    last.pre_swaps = swap_block(qoc, spec.k);
    last.action = verifier.turns.back();
    qoc.turns.push_back(std::move(last));
    return qoc;
}

std::vector<ComplexMatrix> oracle_from_provers(const ProtocolSpec& spec,
                                               const ProverStrategy& provers) {
    const int rounds = spec.prover_turn_count();
    if (provers.turns.size() != static_cast<size_t>(spec.k)) {
        throw ShapeError("prover count does not match the spec");
    }
    const int padded = spec.m * spec.q_M;
    if (spec.q_P > padded) {
        throw ShapeError("private registers exceed the oracle interface width m*q_M");
    }
    for (const auto& list : provers.turns) {
        if (list.size() != static_cast<size_t>(rounds)) {
            throw ShapeError("prover turn count does not match the schedule");
        }
    }
    const std::ptrdiff_t want = std::ptrdiff_t(1) << (spec.q_M + spec.q_P);
    std::vector<ComplexMatrix> oracles;
    oracles.reserve(static_cast<size_t>(spec.k * rounds));
    for (int j = 1; j <= rounds; ++j) {
        for (int i = 1; i <= spec.k; ++i) {
            const ComplexMatrix& p =
                provers.turns[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)];
            if (p.rows() != want || p.cols() != want) {
                std::ostringstream os;
                os << "prover " << i << " turn " << j << " has dimension " << p.rows()
                   << ", expected " << want;
                throw ShapeError(os.str());
            }
            if (spec.q_P == padded) {
                oracles.push_back(p);
            } else {
                const std::ptrdiff_t tail = std::ptrdiff_t(1) << (padded - spec.q_P);
                oracles.push_back(tensor_product(p, ComplexMatrix::Identity(tail, tail)));
            }
        }
    }
    return oracles;
}

ProverStrategy provers_from_oracle(const ProtocolSpec& spec,
                                   const std::vector<ComplexMatrix>& oracles) {
    const int rounds = spec.prover_turn_count();
    const size_t want_count = static_cast<size_t>(spec.k * rounds);
    if (oracles.size() != want_count) {
        std::ostringstream os;
        os << "oracle list has " << oracles.size() << " entries, schedule needs " << want_count;
        throw ShapeError(os.str());
    }
    const std::ptrdiff_t want = std::ptrdiff_t(1) << ((spec.m + 1) * spec.q_M);
    ProverStrategy provers;
    provers.turns.assign(static_cast<size_t>(spec.k), {});
    for (size_t t = 0; t < oracles.size(); ++t) {
        if (oracles[t].rows() != want || oracles[t].cols() != want) {
            std::ostringstream os;
            os << "oracle " << (t + 1) << " has dimension " << oracles[t].rows() << ", expected "
               << want;
            throw ShapeError(os.str());
        }
        provers.turns[t % static_cast<size_t>(spec.k)].push_back(oracles[t]);
    }
    return provers;
}

namespace {

void apply_swaps(PureState& state, const std::vector<std::pair<int, int>>& pairs,
                 const ComplexMatrix& swap4) {
    for (const auto& [a, b] : pairs) {
        apply_unitary_in_place(state, {a, b}, swap4);
    }
}

void apply_qoc_turn(PureState& state, const QocTurn& turn, const std::vector<int>& action_targets,
                    const ComplexMatrix& swap4) {
    apply_swaps(state, turn.pre_swaps, swap4);
    if (turn.action) {
        apply_turn(state, *turn.action, action_targets);
    }
    apply_swaps(state, turn.post_swaps, swap4);
}

}  // namespace

double run_oracle_circuit(const OracleCircuitSpec& qoc, const std::vector<ComplexMatrix>& oracles) {
    const size_t calls = static_cast<size_t>(qoc.oracle_calls());
    if (oracles.size() != calls) {
        throw ShapeError("oracle count does not match the schedule");
    }
    if (qoc.turns.size() != calls + 1) {
        throw ShapeError("turn count does not match the schedule");
    }
    const ComplexMatrix swap4 = swap_gate();
    const std::vector<int> action_targets = qoc.action_qubits();
    const std::vector<int> interface_targets = qoc.oracle_qubits();

    PureState state = PureState::zero(qoc.layout());
    for (size_t t = 0; t < calls; ++t) {
        apply_qoc_turn(state, qoc.turns[t], action_targets, swap4);
        apply_unitary_in_place(state, interface_targets, oracles[t]);
    }
    apply_qoc_turn(state, qoc.turns[calls], action_targets, swap4);
    return measure_output_qubit(state, qoc.output_qubit);
}

LoweredProtocol to_protocol(const OracleCircuitSpec& qoc, const std::vector<ComplexMatrix>& oracles) {
    if (oracles.size() != static_cast<size_t>(qoc.oracle_calls())) {
        throw ShapeError("oracle count does not match the schedule");
    }
    LoweredProtocol out;
    out.spec.k = 1;
    out.spec.m = 2 * qoc.oracle_calls();
    out.spec.q_V = qoc.q_V_qoc();
    out.spec.q_M = qoc.q_O_qoc();
    out.spec.q_P = 0;
    out.spec.q_ent = 0;
    out.spec.output_qubit = qoc.output_qubit;

    const ComplexMatrix swap4 = swap_gate();
    const int action_width = qoc.q_V + qoc.k * qoc.q_M;
    std::vector<int> action_targets(static_cast<size_t>(action_width));
    std::iota(action_targets.begin(), action_targets.end(), 0);

    for (const QocTurn& turn : qoc.turns) {
        GateList list;
        for (const auto& [a, b] : turn.pre_swaps) {
            list.gates.push_back(Gate::unitary({a, b}, swap4));
        }
        if (turn.action) {
            if (const GateList* g = std::get_if<GateList>(&*turn.action)) {
                // Gate targets are local to the leading block, which starts
                // at qubit 0 here as well.
                list.gates.insert(list.gates.end(), g->gates.begin(), g->gates.end());
            } else {
                list.gates.push_back(
                    Gate::unitary(action_targets, std::get<ComplexMatrix>(*turn.action)));
            }
        }
        for (const auto& [a, b] : turn.post_swaps) {
            list.gates.push_back(Gate::unitary({a, b}, swap4));
        }
        out.verifier.turns.push_back(std::move(list));
    }
    out.provers.turns.push_back(oracles);
    return out;
}

double ClassicalTwoProverGame::probability(int v, int q1, int q2) const {
    const size_t idx = (static_cast<size_t>(v) * question_sizes[0] + static_cast<size_t>(q1)) *
                           question_sizes[1] +
                       static_cast<size_t>(q2);
    return probs.at(idx);
}

bool ClassicalTwoProverGame::accepts(int v, int q1, int q2, int a1, int a2) const {
    const size_t idx =
        (((static_cast<size_t>(v) * question_sizes[0] + static_cast<size_t>(q1)) *
              question_sizes[1] +
          static_cast<size_t>(q2)) *
             answer_sizes[0] +
         static_cast<size_t>(a1)) *
            answer_sizes[1] +
        static_cast<size_t>(a2);
    return accept_table.at(idx) != 0;
}

void ClassicalTwoProverGame::check() const {
    if (tape_size < 1 || question_sizes[0] < 1 || question_sizes[1] < 1 || answer_sizes[0] < 1 ||
        answer_sizes[1] < 1) {
        throw ContractError("alphabet sizes must be positive");
    }
    const size_t want_probs = static_cast<size_t>(tape_size) * question_sizes[0] * question_sizes[1];
    if (probs.size() != want_probs) {
        throw ShapeError("probability table size does not match the alphabets");
    }
    if (accept_table.size() != want_probs * answer_sizes[0] * answer_sizes[1]) {
        throw ShapeError("truth table size does not match the alphabets");
    }
    double total = 0.0;
    for (double p : probs) {
        if (p < 0.0) {
            throw ContractError("question probabilities must be nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "question probabilities sum to " << total << ", not 1";
        throw ContractError(os.str());
    }
}

EmbeddedGame embed_classical_game(const ClassicalTwoProverGame& game, const EmbedOptions& options) {
    game.check();
    EmbeddedGame out;
    const int vt = ceil_log2(game.tape_size);
    int q_M = 0;
    for (int size : {game.question_sizes[0], game.question_sizes[1], game.answer_sizes[0],
                     game.answer_sizes[1]}) {
        q_M = std::max(q_M, ceil_log2(size));
    }
    out.q_M = q_M;
    out.tape_qubits = vt;

    out.spec.k = 2;
    out.spec.m = 2;
    out.spec.q_V = 1 + vt + 4 * q_M;
    out.spec.q_M = q_M;
    out.spec.q_ent = options.q_ent;
    out.spec.q_P = options.q_P < 0 ? std::max(q_M, options.q_ent) : options.q_P;
    out.spec.output_qubit = 0;
    if (out.spec.q_ent < 0 || out.spec.q_ent > out.spec.q_P) {
        throw ContractError("q_ent must lie in [0, q_P]");
    }

    // Local qubit indices inside the verifier's reach (V, M1, M2):
    // [output][tape][Q1][Q2][A1][A2][M1][M2].
    auto range = [](int start, int count) {
        std::vector<int> r(static_cast<size_t>(count));
        std::iota(r.begin(), r.end(), start);
        return r;
    };
    const std::vector<int> tape = range(1, vt);
    const std::vector<int> qreg1 = range(1 + vt, q_M);
    const std::vector<int> qreg2 = range(1 + vt + q_M, q_M);
    const std::vector<int> areg1 = range(1 + vt + 2 * q_M, q_M);
    const std::vector<int> areg2 = range(1 + vt + 3 * q_M, q_M);
    const std::vector<int> mreg1 = range(out.spec.q_V, q_M);
    const std::vector<int> mreg2 = range(out.spec.q_V + q_M, q_M);

    // Turn 1: map |0..0> to the question superposition on (tape, Q1, Q2,
    // M1, M2); the reflection through e0 - c extends it to a unitary and
    // leaves the output and answer registers alone.
    const int w1 = vt + 4 * q_M;
    const std::ptrdiff_t d1 = std::ptrdiff_t(1) << w1;
    ComplexVector c = ComplexVector::Zero(d1);
    for (int v = 0; v < game.tape_size; ++v) {
        for (int q1 = 0; q1 < game.question_sizes[0]; ++q1) {
            for (int q2 = 0; q2 < game.question_sizes[1]; ++q2) {
                std::ptrdiff_t idx = v;
                idx = (idx << q_M) | q1;
                idx = (idx << q_M) | q2;
                idx = (idx << q_M) | q1;
                idx = (idx << q_M) | q2;
                c(idx) = std::sqrt(game.probability(v, q1, q2));
            }
        }
    }
    ComplexMatrix prep = ComplexMatrix::Identity(d1, d1);
    {
        ComplexVector w = -c;
        w(0) += 1.0;
        const double wn2 = w.squaredNorm();
        if (wn2 > 1e-28) {
            prep -= (2.0 / wn2) * (w * w.adjoint());
        }
    }
    std::vector<int> prep_targets;
    for (const auto* reg : {&tape, &qreg1, &qreg2, &mreg1, &mreg2}) {
        prep_targets.insert(prep_targets.end(), reg->begin(), reg->end());
    }
    GateList turn1;
    if (w1 > 0) {
        turn1.gates.push_back(Gate::unitary(prep_targets, std::move(prep)));
    }
    out.verifier.turns.push_back(std::move(turn1));

    // Turn 2: copy the answers, then flip the output qubit on accepted
    // transcripts. Bit patterns outside the alphabets never accept.
    GateList turn2;
    const ComplexMatrix cnot = cnot_gate();
    for (int b = 0; b < q_M; ++b) {
        turn2.gates.push_back(Gate::unitary({mreg1[static_cast<size_t>(b)],
                                             areg1[static_cast<size_t>(b)]},
                                            cnot));
        turn2.gates.push_back(Gate::unitary({mreg2[static_cast<size_t>(b)],
                                             areg2[static_cast<size_t>(b)]},
                                            cnot));
    }
    const int w2 = 1 + vt + 4 * q_M;
    const std::ptrdiff_t d2 = std::ptrdiff_t(1) << w2;
    ComplexMatrix flip = ComplexMatrix::Zero(d2, d2);
    const int mask = (q_M > 0) ? (1 << q_M) - 1 : 0;
    for (std::ptrdiff_t idx = 0; idx < d2; ++idx) {
        const int a2 = static_cast<int>(idx) & mask;
        const int a1 = static_cast<int>(idx >> q_M) & mask;
        const int q2 = static_cast<int>(idx >> (2 * q_M)) & mask;
        const int q1 = static_cast<int>(idx >> (3 * q_M)) & mask;
        const int v = static_cast<int>(idx >> (4 * q_M)) & ((1 << vt) - 1);
        const bool in_range = v < game.tape_size && q1 < game.question_sizes[0] &&
                              q2 < game.question_sizes[1] && a1 < game.answer_sizes[0] &&
                              a2 < game.answer_sizes[1];
        const bool acc = in_range && game.accepts(v, q1, q2, a1, a2);
        const std::ptrdiff_t target = acc ? idx ^ (d2 >> 1) : idx;
        flip(target, idx) = 1.0;
    }
    std::vector<int> flip_targets{0};
    for (const auto* reg : {&tape, &qreg1, &qreg2, &areg1, &areg2}) {
        flip_targets.insert(flip_targets.end(), reg->begin(), reg->end());
    }
    turn2.gates.push_back(Gate::unitary(flip_targets, std::move(flip)));
    out.verifier.turns.push_back(std::move(turn2));
    return out;
}

double classical_value(const ClassicalTwoProverGame& game) {
    game.check();
    for (int size : {game.question_sizes[0], game.question_sizes[1], game.answer_sizes[0],
                     game.answer_sizes[1]}) {
        if (size > 4) {
            throw CapacityError("alphabets above size 4 are too large for exhaustive search");
        }
    }
    const int nq1 = game.question_sizes[0];
    const int nq2 = game.question_sizes[1];
    const int na1 = game.answer_sizes[0];
    const int na2 = game.answer_sizes[1];

    long strategies1 = 1;
    for (int q = 0; q < nq1; ++q) {
        strategies1 *= na1;
    }
    long strategies2 = 1;
    for (int q = 0; q < nq2; ++q) {
        strategies2 *= na2;
    }

    auto answer = [](long code, int q, int base) {
        for (int step = 0; step < q; ++step) {
            code /= base;
        }
        return static_cast<int>(code % base);
    };

    double best = 0.0;
    for (long s1 = 0; s1 < strategies1; ++s1) {
        for (long s2 = 0; s2 < strategies2; ++s2) {
            double value = 0.0;
            for (int v = 0; v < game.tape_size; ++v) {
                for (int q1 = 0; q1 < nq1; ++q1) {
                    for (int q2 = 0; q2 < nq2; ++q2) {
                        if (game.accepts(v, q1, q2, answer(s1, q1, na1), answer(s2, q2, na2))) {
                            value += game.probability(v, q1, q2);
                        }
                    }
                }
            }
            best = std::max(best, value);
        }
    }
    return best;
}

}  // namespace qmip
