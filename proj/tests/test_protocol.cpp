#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qmip/errors.hpp"
#include "qmip/protocol.hpp"
#include "qmip/rand.hpp"

using namespace qmip;

namespace {

// Same entrywise expansion as in the state tests: qubit q sits at bit
// (total - 1 - q) of the amplitude index.
ComplexMatrix expand_full(const ComplexMatrix& u, const std::vector<int>& targets, int total) {
    const std::ptrdiff_t dim = std::ptrdiff_t(1) << total;
    const int t = static_cast<int>(targets.size());
    ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
    for (std::ptrdiff_t col = 0; col < dim; ++col) {
        std::ptrdiff_t sub_col = 0;
        for (int i = 0; i < t; ++i)
            sub_col |= ((col >> (total - 1 - targets[i])) & 1) << (t - 1 - i);
        for (std::ptrdiff_t sub_row = 0; sub_row < (std::ptrdiff_t(1) << t); ++sub_row) {
            std::ptrdiff_t row = col;
            for (int i = 0; i < t; ++i) {
                const std::ptrdiff_t mask = std::ptrdiff_t(1) << (total - 1 - targets[i]);
                if ((sub_row >> (t - 1 - i)) & 1)
                    row |= mask;
                else
                    row &= ~mask;
            }
            full(row, col) = u(sub_row, sub_col);
        }
    }
    return full;
}

// Reference run: chain every scheduled step as a full-space matrix onto the
// initial amplitudes. Odd m opens with a prover round, even m with the
// verifier; both schedules end on a verifier turn.
ComplexVector chain_run(const ProtocolSpec& spec, const std::vector<ComplexMatrix>& v_turns,
                        const ProverStrategy& provers, const ComplexVector& init) {
    const int total = spec.total_qubits();
    ComplexVector amps = init;
    int v_next = 0;
    auto verifier_step = [&] {
        amps = expand_full(v_turns[v_next++], spec.verifier_qubits(), total) * amps;
    };
    auto round_step = [&](int j) {
        for (int i = 1; i <= spec.k; ++i)
            amps = expand_full(provers.turns[i - 1][j], spec.prover_qubits(i), total) * amps;
    };
    if (spec.m % 2 == 0) verifier_step();
    for (int j = 0; j < spec.prover_turn_count(); ++j) {
        round_step(j);
        verifier_step();
    }
    return amps;
}

double chain_acceptance(const ProtocolSpec& spec, const ComplexVector& amps) {
    const int total = spec.total_qubits();
    const std::ptrdiff_t mask = std::ptrdiff_t(1) << (total - 1 - spec.output_qubit);
    double p = 0.0;
    for (std::ptrdiff_t i = 0; i < amps.size(); ++i)
        if (i & mask) p += std::norm(amps(i));
    return p;
}

ProverStrategy random_strategy(const ProtocolSpec& spec, Rng& rng) {
    ProverStrategy s;
    const int dim = 1 << (spec.q_M + spec.q_P);
    s.turns.resize(spec.k);
    for (int i = 0; i < spec.k; ++i)
        for (int j = 0; j < spec.prover_turn_count(); ++j)
            s.turns[i].push_back(random_unitary(dim, rng));
    return s;
}

std::vector<ComplexMatrix> random_verifier_matrices(const ProtocolSpec& spec, Rng& rng) {
    std::vector<ComplexMatrix> v;
    const int dim = 1 << (spec.q_V + spec.k * spec.q_M);
    for (int t = 0; t < spec.verifier_turn_count(); ++t) v.push_back(random_unitary(dim, rng));
    return v;
}

VerifierProgram as_program(const std::vector<ComplexMatrix>& v_turns) {
    VerifierProgram p;
    for (const auto& m : v_turns) p.turns.push_back(m);
    return p;
}

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("builtin gate matrices are the advertised ones") {
    const ComplexMatrix h = Gate::hadamard(0).gate_matrix();
    CHECK(std::abs(h(0, 0) - Complex(kInvSqrt2, 0)) < 1e-15);
    CHECK(std::abs(h(1, 1) - Complex(-kInvSqrt2, 0)) < 1e-15);

    const ComplexMatrix sz = Gate::sqrt_z(0).gate_matrix();
    CHECK(sz(0, 0) == Complex(1, 0));
    CHECK(sz(1, 1) == Complex(0, 1));
    CHECK(sz(0, 1) == Complex(0, 0));

    // sqrt_z squared is Z.
    const ComplexMatrix z = sz * sz;
    CHECK(std::abs(z(1, 1) - Complex(-1, 0)) < 1e-15);

    const ComplexMatrix t = Gate::toffoli(0, 1, 2).gate_matrix();
    REQUIRE(t.rows() == 8);
    for (int i = 0; i < 6; ++i) CHECK(t(i, i) == Complex(1, 0));
    CHECK(t(6, 7) == Complex(1, 0));
    CHECK(t(7, 6) == Complex(1, 0));
    CHECK(t(6, 6) == Complex(0, 0));
}

TEST_CASE("explicit gates validate their matrix shape") {
    Rng rng(50);
    CHECK_NOTHROW(Gate::unitary({0, 2}, random_unitary(4, rng)));
    CHECK_THROWS_AS(Gate::unitary({0}, random_unitary(4, rng)), GateError);
    CHECK_THROWS_AS(Gate::unitary({0, 1}, ComplexMatrix::Zero(4, 3)), GateError);
}

TEST_CASE("compile_gates multiplies out the list in application order") {
    Rng rng(51);
    GateList g;
    g.gates.push_back(Gate::hadamard(1));
    g.gates.push_back(Gate::toffoli(2, 0, 1));
    g.gates.push_back(Gate::unitary({2, 1}, random_unitary(4, rng)));
    const ComplexMatrix compiled = compile_gates(g, 3);

    ComplexMatrix manual = ComplexMatrix::Identity(8, 8);
    for (const Gate& gate : g.gates)
        manual = expand_full(gate.gate_matrix(), gate.targets, 3) * manual;
    CHECK((compiled - manual).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(is_unitary(compiled, 1e-10));
}

TEST_CASE("gate lists reject bad targets") {
    GateList g;
    g.gates.push_back(Gate::hadamard(3));
    CHECK_THROWS_AS(compile_gates(g, 2), GateError);

    GateList dupes;
    dupes.gates.push_back(Gate::toffoli(0, 0, 1));
    CHECK_THROWS_AS(compile_gates(dupes, 3), GateError);
}

TEST_CASE("apply_gate_list maps local targets through the turn qubits") {
    Rng rng(52);
    RegisterLayout lay;
    lay.add("A", 4);
    const PureState s(lay, random_state(16, rng));
    GateList g;
    g.gates.push_back(Gate::hadamard(0));
    g.gates.push_back(Gate::sqrt_z(1));

    PureState direct = s;
    apply_gate_list(direct, g, {3, 1});

    ComplexVector manual = s.amplitudes;
    manual = expand_full(Gate::hadamard(0).gate_matrix(), {3}, 4) * manual;
    manual = expand_full(Gate::sqrt_z(0).gate_matrix(), {1}, 4) * manual;
    CHECK((direct.amplitudes - manual).norm() < 1e-13);
}

TEST_CASE("protocol layout orders registers verifier first then messages then provers") {
    ProtocolSpec spec;
    spec.k = 2;
    spec.m = 2;
    spec.q_V = 2;
    spec.q_M = 1;
    spec.q_P = 3;
    const RegisterLayout lay = spec.layout();
    const auto& regs = lay.registers();
    REQUIRE(regs.size() == 5);
    CHECK(regs[0].first == "V");
    CHECK(regs[1].first == "M1");
    CHECK(regs[2].first == "M2");
    CHECK(regs[3].first == "P1");
    CHECK(regs[4].first == "P2");
    CHECK(lay.total_qubits() == 2 + 2 * (1 + 3));
    CHECK(spec.prover_qubits(2) == std::vector<int>{3, 7, 8, 9});
    CHECK(spec.verifier_qubits() == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("turn counts follow the message schedule") {
    // m:        1  2  3  4  5
    // verifier: 1  2  2  3  3
    // prover:   1  1  2  2  3
    const int want_v[] = {1, 2, 2, 3, 3};
    const int want_p[] = {1, 1, 2, 2, 3};
    for (int m = 1; m <= 5; ++m) {
        ProtocolSpec spec;
        spec.m = m;
        CHECK(spec.verifier_turn_count() == want_v[m - 1]);
        CHECK(spec.prover_turn_count() == want_p[m - 1]);
    }
}

TEST_CASE("validate_protocol flags structural problems and passes clean input") {
    Rng rng(53);
    ProtocolSpec spec;
    spec.k = 1;
    spec.m = 2;
    spec.q_V = 1;
    spec.q_M = 1;
    spec.q_P = 1;
    const auto v_turns = random_verifier_matrices(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    CHECK(validate_protocol(spec, as_program(v_turns), provers).empty());

    ProtocolSpec bad = spec;
    bad.output_qubit = 5;
    CHECK_FALSE(validate_protocol(bad, as_program(v_turns), provers).empty());

    bad = spec;
    bad.q_ent = 2;  // exceeds q_P
    CHECK_FALSE(validate_protocol(bad, as_program(v_turns), provers).empty());

    VerifierProgram short_program;
    short_program.turns.push_back(v_turns[0]);
    CHECK_FALSE(validate_protocol(spec, short_program, provers).empty());

    ProverStrategy wrong_dim = provers;
    wrong_dim.turns[0][0] = random_unitary(8, rng);
    CHECK_FALSE(validate_protocol(spec, as_program(v_turns), wrong_dim).empty());

    PriorEntanglement prior = PriorEntanglement::maximally_entangled(2, 1);
    ProtocolSpec no_room = spec;
    no_room.q_ent = 0;
    CHECK_FALSE(validate_protocol(no_room, as_program(v_turns), provers, prior).empty());
}

TEST_CASE("initial_state plants the prior on the leading prover qubits") {
    ProtocolSpec spec;
    spec.k = 2;
    spec.m = 2;
    spec.q_V = 1;
    spec.q_M = 1;
    spec.q_P = 2;
    spec.q_ent = 1;
    const PureState init =
        initial_state(spec, PriorEntanglement::maximally_entangled(2, 1));
    // Designated qubits are the first of P1 (global 3) and of P2 (global 5);
    // over 7 qubits those are index bits 3 and 1.
    CHECK(std::abs(init.amplitudes(0) - Complex(kInvSqrt2, 0)) < 1e-14);
    CHECK(std::abs(init.amplitudes(0b0001010) - Complex(kInvSqrt2, 0)) < 1e-14);
    CHECK(std::abs(init.amplitudes.norm() - 1.0) < 1e-14);

    const PureState plain = initial_state(spec, PriorEntanglement::none());
    CHECK(plain.amplitudes(0) == Complex(1, 0));
}

TEST_CASE("run_protocol matches full-matrix chaining on random instances") {
    Rng rng(54);
    for (const int k : {1, 2}) {
        for (const int m : {1, 2, 3}) {
            ProtocolSpec spec;
            spec.k = k;
            spec.m = m;
            spec.q_V = 1;
            spec.q_M = 1;
            spec.q_P = 1;
            spec.q_ent = (k == 2) ? 1 : 0;
            const auto v_turns = random_verifier_matrices(spec, rng);
            const ProverStrategy provers = random_strategy(spec, rng);
            const PriorEntanglement prior =
                (k == 2) ? PriorEntanglement::maximally_entangled(2, 1)
                         : PriorEntanglement::none();

            const RunResult run = run_protocol(spec, as_program(v_turns), provers, prior);
            const ComplexVector want =
                chain_run(spec, v_turns, provers, initial_state(spec, prior).amplitudes);
            CHECK((run.final_state.amplitudes - want).norm() < 1e-11);
            CHECK(run.acceptance ==
                  doctest::Approx(chain_acceptance(spec, want)).epsilon(1e-11));
        }
    }
}

TEST_CASE("gate list verifier turns run the same as their compiled matrices") {
    Rng rng(55);
    ProtocolSpec spec;
    spec.k = 1;
    spec.m = 2;
    spec.q_V = 1;
    spec.q_M = 2;
    spec.q_P = 1;
    GateList first;
    first.gates.push_back(Gate::hadamard(0));
    first.gates.push_back(Gate::toffoli(0, 1, 2));
    GateList second;
    second.gates.push_back(Gate::unitary({1, 0}, random_unitary(4, rng)));
    second.gates.push_back(Gate::sqrt_z(2));

    VerifierProgram gates;
    gates.turns.push_back(first);
    gates.turns.push_back(second);
    VerifierProgram matrices;
    matrices.turns.push_back(compile_gates(first, 3));
    matrices.turns.push_back(compile_gates(second, 3));

    const ProverStrategy provers = random_strategy(spec, rng);
    const RunResult a = run_protocol(spec, gates, provers);
    const RunResult b = run_protocol(spec, matrices, provers);
    CHECK((a.final_state.amplitudes - b.final_state.amplitudes).norm() < 1e-12);
}

TEST_CASE("prover application order within a round is unobservable") {
    Rng rng(56);
    ProtocolSpec spec;
    spec.k = 3;
    spec.m = 3;
    spec.q_V = 1;
    spec.q_M = 1;
    spec.q_P = 1;
    const auto v_turns = random_verifier_matrices(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);

    RunOptions forward;
    forward.prover_order = {1, 2, 3};
    RunOptions shuffled;
    shuffled.prover_order = {3, 1, 2};
    const RunResult a = run_protocol(spec, as_program(v_turns), provers, {}, forward);
    const RunResult b = run_protocol(spec, as_program(v_turns), provers, {}, shuffled);
    CHECK((a.final_state.amplitudes - b.final_state.amplitudes).norm() < 1e-12);

    RunOptions bad;
    bad.prover_order = {1, 1, 2};
    CHECK_THROWS_AS(run_protocol(spec, as_program(v_turns), provers, {}, bad), ContractError);
}

TEST_CASE("runs record snapshots and keep unit norm at every step") {
    Rng rng(57);
    ProtocolSpec spec;
    spec.k = 2;
    spec.m = 4;
    spec.q_V = 2;
    spec.q_M = 1;
    spec.q_P = 1;
    const auto v_turns = random_verifier_matrices(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    RunOptions opts;
    opts.snapshot_after_verifier_turns = true;
    const RunResult run = run_protocol(spec, as_program(v_turns), provers, {}, opts);
    CHECK(run.verifier_snapshots.size() ==
          static_cast<size_t>(spec.verifier_turn_count()));
    CHECK(run.step_norms.size() ==
          static_cast<size_t>(spec.verifier_turn_count() + spec.prover_turn_count()));
    for (const double n : run.step_norms) CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((run.verifier_snapshots.back().amplitudes - run.final_state.amplitudes).norm() <
          1e-14);
}

TEST_CASE("acceptance reads the output qubit after the last verifier turn") {
    ProtocolSpec spec;
    spec.k = 1;
    spec.m = 1;
    spec.q_V = 1;
    spec.q_M = 1;
    spec.q_P = 0;

    ProverStrategy idle;
    idle.turns = {{ComplexMatrix::Identity(2, 2)}};

    VerifierProgram keep;
    keep.turns.push_back(ComplexMatrix::Identity(4, 4));
    CHECK(run_protocol(spec, keep, idle).acceptance == doctest::Approx(0.0));

    // h, sz, sz, h on the output qubit is a bit flip.
    GateList flip;
    flip.gates.push_back(Gate::hadamard(0));
    flip.gates.push_back(Gate::sqrt_z(0));
    flip.gates.push_back(Gate::sqrt_z(0));
    flip.gates.push_back(Gate::hadamard(0));
    VerifierProgram flipper;
    flipper.turns.push_back(flip);
    CHECK(run_protocol(spec, flipper, idle).acceptance == doctest::Approx(1.0));
}
