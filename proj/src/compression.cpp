#include "qmip/compression.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace qmip {
namespace {

// Drives the protocol schedule, delegating each prover round to `round_fn`
// (which may rewrite the state arbitrarily) and applying verifier turns in
// between. Returns the final state.
template <typename RoundFn>
PureState run_schedule(const ProtocolSpec& spec, const VerifierProgram& verifier,
                       const PriorEntanglement& prior, RoundFn&& round_fn) {
    if (verifier.turns.size() != static_cast<size_t>(spec.verifier_turn_count())) {
        throw ShapeError("verifier turn count does not match the schedule");
    }
    PureState state = initial_state(spec, prior);
    const std::vector<int> vq = spec.verifier_qubits();
    size_t vi = 0;
    if (spec.m % 2 == 0) {
        apply_turn(state, verifier.turns[vi++], vq);
    }
    const int rounds = spec.prover_turn_count();
    for (int j = 0; j < rounds; ++j) {
        round_fn(state, j);
        apply_turn(state, verifier.turns[vi++], vq);
    }
    return state;
}

void check_prover_shape(const ProtocolSpec& spec, const ProverStrategy& provers) {
    if (provers.turns.size() != static_cast<size_t>(spec.k)) {
        throw ShapeError("prover count does not match the spec");
    }
    for (const auto& list : provers.turns) {
        if (list.size() != static_cast<size_t>(spec.prover_turn_count())) {
            throw ShapeError("prover turn count does not match the schedule");
        }
    }
}

// Replacement turns are synthesized at the shrunken private width; extending
// them by identity on the dropped qubits (the trailing, least significant
// ones) gives the turn at the original width.
ComplexMatrix extend_by_identity(const ComplexMatrix& reduced, int dropped_qubits) {
    if (dropped_qubits == 0) {
        return reduced;
    }
    const std::ptrdiff_t tail = std::ptrdiff_t(1) << dropped_qubits;
    return tensor_product(reduced, ComplexMatrix::Identity(tail, tail));
}

}  // namespace

CompressedProver compress_single_prover(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                        const std::vector<ComplexMatrix>& prover_turns,
                                        double tol) {
    if (spec.k != 1) {
        throw ContractError("single-prover compression needs k = 1");
    }
    if (spec.q_ent != 0) {
        throw ContractError(
            "single-prover compression takes no prior entanglement; fold the prior into the "
            "first turn and set q_ent = 0");
    }
    ProverStrategy strategy;
    strategy.turns.push_back(prover_turns);
    check_prover_shape(spec, strategy);

    const int budget = spec.q_V + spec.q_M;
    CompressedProver out;
    out.trace.prover = 1;
    out.trace.budget = budget;
    if (spec.q_P <= budget) {
        out.turns = prover_turns;
        out.q_P = spec.q_P;
        return out;
    }

    // Pass 1: the protocol as given, keeping the state around the prover's
    // turn in every round.
    const std::vector<int> pq = spec.prover_qubits(1);
    std::vector<PureState> phis;
    std::vector<PureState> psis;
    const PureState original_final =
        run_schedule(spec, verifier, PriorEntanglement::none(), [&](PureState& state, int j) {
            phis.push_back(state);
            apply_unitary_in_place(state, pq, prover_turns[static_cast<size_t>(j)]);
            psis.push_back(state);
        });
    const double original_acceptance = measure_output_qubit(original_final, spec.output_qubit);

    // Pass 2: the same schedule on a q_V + q_M wide private register. Each
    // round's after-state is re-purified into that register; what the small
    // prover applies is the unitary bridging the two purifications.
    ProtocolSpec capped = spec;
    capped.q_P = budget;
    capped.q_ent = 0;
    const std::string msg = spec.message_register(1);
    const std::string priv = spec.prover_register(1);

    run_schedule(capped, verifier, PriorEntanglement::none(), [&](PureState& state, int j) {
        const PureState phi_capped = state;
        const DensityMatrix visible = partial_trace(psis[static_cast<size_t>(j)], {"V", msg});
        const PureState psi_capped = purify(visible, priv);
        const ComplexMatrix turn = uhlmann_unitary(phi_capped, psi_capped, {msg, priv}, tol);
        out.turns.push_back(turn);
        out.trace.rounds.push_back(CompressionRound{
            phis[static_cast<size_t>(j)], psis[static_cast<size_t>(j)], phi_capped, psi_capped,
            turn, ComplexMatrix(),
            ent2(psis[static_cast<size_t>(j)], {priv})});
        state = psi_capped;
    });

    ProverStrategy rebuilt;
    rebuilt.turns.push_back(out.turns);
    const double capped_acceptance =
        run_protocol(capped, verifier, rebuilt, PriorEntanglement::none()).acceptance;
    out.q_P = budget;
    out.acceptance_delta = std::abs(capped_acceptance - original_acceptance);
    return out;
}

CompressedProver compress_prover(const ProtocolSpec& in_spec, const VerifierProgram& verifier,
                                 const ProverStrategy& in_provers, int prover_index,
                                 const PriorEntanglement& prior, double tol) {
    check_prover_shape(in_spec, in_provers);
    if (prover_index < 1 || prover_index > in_spec.k) {
        throw ContractError("prover index out of range");
    }
    const int rounds = in_spec.prover_turn_count();
    const int budget = in_spec.q_ent + 2 * rounds * in_spec.q_M;

    CompressedProver out;
    out.trace.prover = prover_index;
    out.trace.budget = budget;

    // The rebuilt prover always gets exactly `budget` private qubits, so a
    // narrower input is first padded with idle qubits. Both tracks then share
    // one working width and the pad is dropped again at the end.
    ProtocolSpec spec = in_spec;
    spec.q_P = std::max(in_spec.q_P, budget);
    ProverStrategy provers = in_provers;
    if (spec.q_P > in_spec.q_P) {
        for (auto& list : provers.turns) {
            for (auto& turn : list) {
                turn = extend_by_identity(turn, spec.q_P - in_spec.q_P);
            }
        }
    }

    const std::string msg = spec.message_register(prover_index);
    const std::string priv = spec.prover_register(prover_index);
    const std::vector<int> pq = spec.prover_qubits(prover_index);

    // Within a round the provers act on disjoint registers, so their order
    // is free; putting the rebuilt prover first keeps the before/after
    // states adjacent.
    auto apply_others = [&](PureState& state, int j) {
        for (int i = 1; i <= spec.k; ++i) {
            if (i == prover_index) {
                continue;
            }
            apply_unitary_in_place(
                state, spec.prover_qubits(i),
                provers.turns[static_cast<size_t>(i - 1)][static_cast<size_t>(j)]);
        }
    };

    std::vector<PureState> phis;
    std::vector<PureState> psis;
    const PureState original_final =
        run_schedule(spec, verifier, prior, [&](PureState& state, int j) {
            phis.push_back(state);
            apply_unitary_in_place(
                state, pq,
                provers.turns[static_cast<size_t>(prover_index - 1)][static_cast<size_t>(j)]);
            psis.push_back(state);
            apply_others(state, j);
        });
    const double original_acceptance = measure_output_qubit(original_final, spec.output_qubit);

    // Replacement pass: same registers, but after every round the rebuilt
    // prover's private support is confined to its q_ent + 2j*q_M leading
    // qubits. The growth bound keeps the confinement feasible; a capacity
    // failure here would mean the bound itself was violated.
    std::vector<ComplexMatrix> full_width_turns;
    run_schedule(spec, verifier, prior, [&](PureState& state, int j) {
        const PureState phi_capped = state;
        PureState psi_capped = [&] {
            try {
                return compress_subsystem(psis[static_cast<size_t>(j)], priv,
                                          spec.q_ent + 2 * (j + 1) * spec.q_M);
            } catch (const CapacityError& e) {
                std::ostringstream os;
                os << "round " << (j + 1)
                   << ": confinement exceeded the proven growth bound (internal error): "
                   << e.what();
                throw CapacityError(os.str());
            }
        }();
        const ComplexMatrix realignment =
            uhlmann_unitary(psi_capped, psis[static_cast<size_t>(j)], {priv}, tol);

        // Both capped states have their private tails pinned to |0>, so the
        // bridging unitary can be synthesized at the budget width and padded
        // back up with an identity.
        const PureState phi_small = restrict_register(phi_capped, priv, budget);
        const PureState psi_small = restrict_register(psi_capped, priv, budget);
        const ComplexMatrix turn_small = uhlmann_unitary(phi_small, psi_small, {msg, priv}, tol);
        const ComplexMatrix turn_full = extend_by_identity(turn_small, spec.q_P - budget);

        const PureState reached = apply_unitary(phi_capped, pq, turn_full);
        const double miss = (reached.amplitudes - psi_capped.amplitudes).norm();
        if (miss > 1e-9) {
            std::ostringstream os;
            os << "round " << (j + 1) << ": replacement turn misses its target state by " << miss;
            throw NumericError(os.str());
        }

        out.turns.push_back(turn_small);
        full_width_turns.push_back(turn_full);
        out.trace.rounds.push_back(CompressionRound{
            phis[static_cast<size_t>(j)], psis[static_cast<size_t>(j)], phi_capped, psi_capped,
            turn_full, realignment,
            ent2(psis[static_cast<size_t>(j)], {priv})});
        state = psi_capped;
        apply_others(state, j);
    });

    ProverStrategy swapped = provers;
    swapped.turns[static_cast<size_t>(prover_index - 1)] = full_width_turns;
    const double swapped_acceptance = run_protocol(spec, verifier, swapped, prior).acceptance;
    out.q_P = budget;
    out.acceptance_delta = std::abs(swapped_acceptance - original_acceptance);
    return out;
}

CompressedProtocol compress_all_provers(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                        const ProverStrategy& provers,
                                        const PriorEntanglement& prior, double tol) {
    check_prover_shape(spec, provers);
    CompressedProtocol out;
    out.original_acceptance = run_protocol(spec, verifier, provers, prior).acceptance;

    const int rounds = spec.prover_turn_count();
    const int budget = spec.q_ent + 2 * rounds * spec.q_M;

    // Every prover is rebuilt against the tuple already containing the
    // previous replacements, all at one shared working width; the rebuilt
    // turns themselves only touch the first `budget` private qubits.
    ProtocolSpec wspec = spec;
    wspec.q_P = std::max(spec.q_P, budget);
    ProverStrategy working = provers;
    if (wspec.q_P > spec.q_P) {
        for (auto& list : working.turns) {
            for (auto& turn : list) {
                turn = extend_by_identity(turn, wspec.q_P - spec.q_P);
            }
        }
    }
    for (int i = 1; i <= wspec.k; ++i) {
        CompressedProver cp = compress_prover(wspec, verifier, working, i, prior, tol);
        std::vector<ComplexMatrix> full;
        full.reserve(cp.trace.rounds.size());
        for (const CompressionRound& r : cp.trace.rounds) {
            full.push_back(r.replacement);
        }
        working.turns[static_cast<size_t>(i - 1)] = std::move(full);
        out.per_prover.push_back(std::move(cp));
    }

    out.spec = spec;
    out.spec.q_P = budget;
    out.provers.turns.clear();
    for (const CompressedProver& cp : out.per_prover) {
        out.provers.turns.push_back(cp.turns);
    }
    out.compressed_acceptance = run_protocol(out.spec, verifier, out.provers, prior).acceptance;
    return out;
}

namespace {

int infer_private_width(const ProtocolSpec& spec, const ProverStrategy& strategy) {
    if (strategy.turns.empty() || strategy.turns.front().empty()) {
        return spec.q_P;
    }
    const std::ptrdiff_t dim = strategy.turns.front().front().rows();
    int bits = 0;
    while ((std::ptrdiff_t(1) << bits) < dim) {
        ++bits;
    }
    if ((std::ptrdiff_t(1) << bits) != dim || bits < spec.q_M) {
        std::ostringstream os;
        os << "prover turn dimension " << dim << " is not 2^(q_M + q_P) for q_M = " << spec.q_M;
        throw ShapeError(os.str());
    }
    return bits - spec.q_M;
}

}  // namespace

EquivalenceReport verify_equivalence(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                     const ProverStrategy& provers_a,
                                     const ProverStrategy& provers_b,
                                     const PriorEntanglement& prior) {
    RunOptions options;
    options.snapshot_after_verifier_turns = true;

    ProtocolSpec spec_a = spec;
    spec_a.q_P = infer_private_width(spec, provers_a);
    ProtocolSpec spec_b = spec;
    spec_b.q_P = infer_private_width(spec, provers_b);

    const RunResult ra = run_protocol(spec_a, verifier, provers_a, prior, options);
    const RunResult rb = run_protocol(spec_b, verifier, provers_b, prior, options);

    std::vector<std::string> visible{"V"};
    for (int i = 1; i <= spec.k; ++i) {
        visible.push_back(spec.message_register(i));
    }

    EquivalenceReport report;
    report.acceptance_a = ra.acceptance;
    report.acceptance_b = rb.acceptance;
    for (size_t t = 0; t < ra.verifier_snapshots.size() && t < rb.verifier_snapshots.size(); ++t) {
        const DensityMatrix da = partial_trace(ra.verifier_snapshots[t], visible);
        const DensityMatrix db = partial_trace(rb.verifier_snapshots[t], visible);
        report.view_gaps.push_back(operator_norm(da.matrix - db.matrix));
    }
    return report;
}

}  // namespace qmip
