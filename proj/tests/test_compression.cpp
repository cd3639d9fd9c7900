#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "qmip/compression.hpp"
#include "qmip/errors.hpp"
#include "qmip/protocol.hpp"
#include "qmip/rand.hpp"
#include "qmip/states.hpp"

using namespace qmip;

namespace {

ProverStrategy random_strategy(const ProtocolSpec& spec, Rng& rng) {
    ProverStrategy s;
    const int dim = 1 << (spec.q_M + spec.q_P);
    s.turns.resize(spec.k);
    for (int i = 0; i < spec.k; ++i)
        for (int j = 0; j < spec.prover_turn_count(); ++j)
            s.turns[i].push_back(random_unitary(dim, rng));
    return s;
}

VerifierProgram random_verifier(const ProtocolSpec& spec, Rng& rng) {
    VerifierProgram v;
    const int dim = 1 << (spec.q_V + spec.k * spec.q_M);
    for (int t = 0; t < spec.verifier_turn_count(); ++t)
        v.turns.push_back(random_unitary(dim, rng));
    return v;
}

ProtocolSpec make_spec(int k, int m, int q_V, int q_M, int q_P, int q_ent = 0) {
    ProtocolSpec spec;
    spec.k = k;
    spec.m = m;
    spec.q_V = q_V;
    spec.q_M = q_M;
    spec.q_P = q_P;
    spec.q_ent = q_ent;
    return spec;
}

}  // namespace

TEST_CASE("single prover rebuild fits the verifier plus message budget") {
    Rng rng(60);
    const ProtocolSpec spec = make_spec(1, 2, 1, 1, 3);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    const double original = run_protocol(spec, verifier, provers).acceptance;

    const CompressedProver cp = compress_single_prover(spec, verifier, provers.turns[0]);
    CHECK(cp.q_P == 2);
    CHECK(cp.trace.budget == 2);
    REQUIRE(cp.turns.size() == 1);
    CHECK(cp.turns[0].rows() == 8);
    CHECK(cp.acceptance_delta <= 1e-8);
    REQUIRE(cp.trace.rounds.size() == 1);

    // Independent re-run at the small width.
    ProtocolSpec small = spec;
    small.q_P = cp.q_P;
    ProverStrategy rebuilt;
    rebuilt.turns.push_back(cp.turns);
    const double replayed = run_protocol(small, verifier, rebuilt).acceptance;
    CHECK(std::abs(replayed - original) <= 1e-8);
}

TEST_CASE("single prover rebuild handles a two-round schedule") {
    Rng rng(61);
    const ProtocolSpec spec = make_spec(1, 3, 1, 1, 4);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    const double original = run_protocol(spec, verifier, provers).acceptance;

    const CompressedProver cp = compress_single_prover(spec, verifier, provers.turns[0]);
    CHECK(cp.q_P == 2);
    REQUIRE(cp.turns.size() == 2);
    CHECK(cp.acceptance_delta <= 1e-8);

    ProtocolSpec small = spec;
    small.q_P = cp.q_P;
    ProverStrategy rebuilt;
    rebuilt.turns.push_back(cp.turns);
    CHECK(std::abs(run_protocol(small, verifier, rebuilt).acceptance - original) <= 1e-8);
}

TEST_CASE("a prover already inside the budget is returned untouched") {
    Rng rng(62);
    const ProtocolSpec spec = make_spec(1, 2, 1, 1, 2);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);

    const CompressedProver cp = compress_single_prover(spec, verifier, provers.turns[0]);
    CHECK(cp.q_P == 2);
    CHECK(cp.trace.rounds.empty());
    CHECK(cp.acceptance_delta == 0.0);
    REQUIRE(cp.turns.size() == provers.turns[0].size());
    for (size_t j = 0; j < cp.turns.size(); ++j)
        CHECK((cp.turns[j] - provers.turns[0][j]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single prover pipeline rejects multi-prover specs and priors") {
    Rng rng(63);
    const ProtocolSpec two = make_spec(2, 2, 1, 1, 3);
    const VerifierProgram v2 = random_verifier(two, rng);
    const ProverStrategy s2 = random_strategy(two, rng);
    CHECK_THROWS_AS(compress_single_prover(two, v2, s2.turns[0]), ContractError);

    const ProtocolSpec entangled = make_spec(1, 2, 1, 1, 3, 1);
    const VerifierProgram v1 = random_verifier(entangled, rng);
    const ProverStrategy s1 = random_strategy(entangled, rng);
    CHECK_THROWS_AS(compress_single_prover(entangled, v1, s1.turns[0]), ContractError);
}

TEST_CASE("two-prover rebuild lands on its exact budget and confines support") {
    Rng rng(64);
    const ProtocolSpec spec = make_spec(2, 2, 1, 1, 4, 1);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    const PriorEntanglement prior = PriorEntanglement::maximally_entangled(2, 1);
    const double original = run_protocol(spec, verifier, provers, prior).acceptance;

    const CompressedProver cp = compress_prover(spec, verifier, provers, 1, prior);
    // budget = q_ent + 2 * rounds * q_M = 1 + 2*1*1
    CHECK(cp.trace.budget == 3);
    CHECK(cp.q_P == 3);
    REQUIRE(cp.turns.size() == 1);
    CHECK(cp.turns[0].rows() == 16);
    CHECK(cp.acceptance_delta <= 1e-8);

    REQUIRE(cp.trace.rounds.size() == 1);
    const CompressionRound& r = cp.trace.rounds[0];
    // After round 1 the rebuilt prover's support sits on its first
    // q_ent + 2*q_M qubits.
    CHECK(support_leak(r.psi_capped, "P1", 3) <= 1e-9);
    CHECK(r.schmidt_rank <= 8);

    // The realignment rotates the confined state back onto the original one.
    const PureState realigned =
        apply_unitary(r.psi_capped, r.psi_capped.layout.qubits_of("P1"), r.realignment);
    CHECK((realigned.amplitudes - r.psi.amplitudes).norm() <= 1e-8);

    // Swapping the full-width replacement into the tuple leaves the
    // acceptance where it was.
    ProverStrategy swapped = provers;
    swapped.turns[0] = {r.replacement};
    CHECK(std::abs(run_protocol(spec, verifier, swapped, prior).acceptance - original) <= 1e-8);
}

TEST_CASE("a prover narrower than its budget is grown onto it") {
    Rng rng(65);
    const ProtocolSpec spec = make_spec(2, 2, 1, 1, 1, 1);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    const PriorEntanglement prior = PriorEntanglement::maximally_entangled(2, 1);

    const CompressedProver cp = compress_prover(spec, verifier, provers, 2, prior);
    CHECK(cp.trace.budget == 3);
    CHECK(cp.q_P == 3);
    REQUIRE(cp.turns.size() == 1);
    CHECK(cp.turns[0].rows() == 16);
    CHECK(cp.acceptance_delta <= 1e-8);
}

TEST_CASE("multi-round rebuild tracks the growth bound round by round") {
    Rng rng(66);
    const ProtocolSpec spec = make_spec(2, 3, 1, 1, 5);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);

    const CompressedProver cp = compress_prover(spec, verifier, provers, 2, {});
    // budget = 0 + 2 * 2 * 1
    CHECK(cp.trace.budget == 4);
    CHECK(cp.q_P == 4);
    REQUIRE(cp.trace.rounds.size() == 2);
    CHECK(cp.acceptance_delta <= 1e-8);

    for (size_t j = 0; j < cp.trace.rounds.size(); ++j) {
        const CompressionRound& r = cp.trace.rounds[j];
        const int allowed = 2 * (static_cast<int>(j) + 1);
        CHECK(support_leak(r.psi_capped, "P2", allowed) <= 1e-9);
        CHECK(r.schmidt_rank <= (1 << allowed));
        const PureState realigned =
            apply_unitary(r.psi_capped, r.psi_capped.layout.qubits_of("P2"), r.realignment);
        CHECK((realigned.amplitudes - r.psi.amplitudes).norm() <= 1e-8);
    }
}

TEST_CASE("compress_all_provers rebuilds every prover at the shared budget") {
    Rng rng(67);
    const ProtocolSpec spec = make_spec(2, 2, 1, 1, 4, 1);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    const PriorEntanglement prior = PriorEntanglement::maximally_entangled(2, 1);

    const CompressedProtocol cps = compress_all_provers(spec, verifier, provers, prior);
    CHECK(cps.spec.q_P == 3);
    REQUIRE(cps.per_prover.size() == 2);
    REQUIRE(cps.provers.turns.size() == 2);
    for (const auto& turns : cps.provers.turns) {
        REQUIRE(turns.size() == 1);
        CHECK(turns[0].rows() == 16);
    }
    CHECK(std::abs(cps.compressed_acceptance - cps.original_acceptance) <= 1e-7);

    // The rebuilt tuple is indistinguishable from the original from the
    // verifier's seat, not just at the final measurement.
    const EquivalenceReport rep =
        verify_equivalence(spec, verifier, provers, cps.provers, prior);
    CHECK(std::abs(rep.acceptance_a - rep.acceptance_b) <= 1e-7);
    for (const double g : rep.view_gaps) CHECK(g <= 1e-7);
}

TEST_CASE("verify_equivalence separates identical from perturbed strategies") {
    Rng rng(68);
    const ProtocolSpec spec = make_spec(2, 2, 1, 1, 2, 1);
    const VerifierProgram verifier = random_verifier(spec, rng);
    const ProverStrategy provers = random_strategy(spec, rng);
    const PriorEntanglement prior = PriorEntanglement::maximally_entangled(2, 1);

    const EquivalenceReport same = verify_equivalence(spec, verifier, provers, provers, prior);
    CHECK(same.acceptance_a == doctest::Approx(same.acceptance_b).epsilon(1e-12));
    REQUIRE(same.view_gaps.size() ==
            static_cast<size_t>(spec.verifier_turn_count()));
    for (const double g : same.view_gaps) CHECK(g <= 1e-12);

    ProverStrategy tweaked = provers;
    tweaked.turns[0][0] = random_unitary(8, rng) * tweaked.turns[0][0];
    const EquivalenceReport diff =
        verify_equivalence(spec, verifier, provers, tweaked, prior);
    double worst = 0.0;
    for (const double g : diff.view_gaps) worst = std::max(worst, g);
    CHECK(worst > 1e-6);
}

TEST_CASE("the private budget follows the round count and message width") {
    Rng rng(69);
    // Round-count factor: four messages mean two rounds.
    const ProtocolSpec rounds_spec = make_spec(1, 4, 1, 1, 1, 1);
    const VerifierProgram rounds_verifier = random_verifier(rounds_spec, rng);
    const ProverStrategy rounds_provers = random_strategy(rounds_spec, rng);
    const PriorEntanglement prior = PriorEntanglement::maximally_entangled(1, 1);
    const CompressedProver by_rounds =
        compress_prover(rounds_spec, rounds_verifier, rounds_provers, 1, prior);
    CHECK(by_rounds.trace.budget == 5);  // 1 + 2*2*1
    CHECK(by_rounds.q_P == 5);

    // Message-width factor: one round of two-qubit messages.
    const ProtocolSpec wide_spec = make_spec(1, 2, 1, 2, 1);
    const VerifierProgram wide_verifier = random_verifier(wide_spec, rng);
    const ProverStrategy wide_provers = random_strategy(wide_spec, rng);
    const CompressedProver by_width =
        compress_prover(wide_spec, wide_verifier, wide_provers, 1, {});
    CHECK(by_width.trace.budget == 4);  // 0 + 2*1*2
    CHECK(by_width.q_P == 4);
}
