#include "qmip/optimizer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "qmip/rand.hpp"

namespace qmip {
namespace {

// The schedule flattened to a list of concrete unitary applications, with
// prover turns tagged so the optimizer can find its free slot.
struct Op {
    std::vector<int> qubits;
    ComplexMatrix matrix;
    int prover = 0;  // 0 = verifier
    int round = 0;   // 1-based for prover ops
};

std::vector<Op> materialize(const ProtocolSpec& spec, const VerifierProgram& verifier,
                            const ProverStrategy& provers) {
    if (verifier.turns.size() != static_cast<size_t>(spec.verifier_turn_count())) {
        throw ShapeError("verifier turn count does not match the schedule");
    }
    if (provers.turns.size() != static_cast<size_t>(spec.k)) {
        throw ShapeError("prover count does not match the spec");
    }
    const std::vector<int> vq = spec.verifier_qubits();
    std::vector<Op> ops;

    auto add_verifier_turn = [&](const Turn& turn) {
        if (const GateList* g = std::get_if<GateList>(&turn)) {
            for (const Gate& gate : g->gates) {
                std::vector<int> global;
                global.reserve(gate.targets.size());
                for (int t : gate.targets) {
                    global.push_back(vq.at(static_cast<size_t>(t)));
                }
                ops.push_back(Op{std::move(global), gate.gate_matrix(), 0, 0});
            }
        } else {
            ops.push_back(Op{vq, std::get<ComplexMatrix>(turn), 0, 0});
        }
    };

    size_t vi = 0;
    if (spec.m % 2 == 0) {
        add_verifier_turn(verifier.turns[vi++]);
    }
    const int rounds = spec.prover_turn_count();
    for (int j = 1; j <= rounds; ++j) {
        for (int i = 1; i <= spec.k; ++i) {
            const auto& list = provers.turns[static_cast<size_t>(i - 1)];
            if (list.size() != static_cast<size_t>(rounds)) {
                throw ShapeError("prover turn count does not match the schedule");
            }
            ops.push_back(Op{spec.prover_qubits(i), list[static_cast<size_t>(j - 1)], i, j});
        }
        add_verifier_turn(verifier.turns[vi++]);
    }
    return ops;
}

// Zeroes every amplitude whose output bit reads |0> and returns the removed
// probability's complement (the acceptance at this point).
double project_accept(PureState& state, int output_qubit) {
    const int total = state.layout.total_qubits();
    const std::uint64_t bit = std::uint64_t(1) << (total - 1 - output_qubit);
    double kept = 0.0;
    for (std::ptrdiff_t idx = 0; idx < state.amplitudes.size(); ++idx) {
        if (static_cast<std::uint64_t>(idx) & bit) {
            kept += std::norm(state.amplitudes(idx));
        } else {
            state.amplitudes(idx) = 0.0;
        }
    }
    return kept;
}

}  // namespace

VerificationResult verify_certificate(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                      const Certificate& cert, double threshold, double eps) {
    VerificationResult result;
    result.claimed_value = cert.claimed_value;

    ProverStrategy sanitized = cert.provers;
    if (sanitized.turns.size() != static_cast<size_t>(spec.k)) {
        throw ShapeError("certificate prover count does not match the spec");
    }
    const std::ptrdiff_t want = std::ptrdiff_t(1) << (spec.q_M + spec.q_P);
    for (size_t i = 0; i < sanitized.turns.size(); ++i) {
        auto& list = sanitized.turns[i];
        if (list.size() != static_cast<size_t>(spec.prover_turn_count())) {
            throw ShapeError("certificate turn count does not match the schedule");
        }
        for (size_t j = 0; j < list.size(); ++j) {
            ComplexMatrix& u = list[j];
            if (u.rows() != want || u.cols() != want) {
                std::ostringstream os;
                os << "certificate prover " << (i + 1) << " turn " << (j + 1) << " has dimension "
                   << u.rows() << ", expected " << want;
                throw ShapeError(os.str());
            }
            if (is_unitary(u)) {
                continue;
            }
            const double deviation =
                (u.adjoint() * u - ComplexMatrix::Identity(want, want)).cwiseAbs().maxCoeff();
            if (deviation <= 1e-6) {
                u = polar_unitary(u);
            } else {
                std::ostringstream os;
                os << "prover " << (i + 1) << " turn " << (j + 1)
                   << " deviates from unitarity by " << deviation;
                result.reason = os.str();
                return result;
            }
        }
    }

    result.measured_value = run_protocol(spec, verifier, sanitized, cert.prior).acceptance;
    if (result.measured_value >= threshold - eps) {
        result.accepted = true;
    } else {
        std::ostringstream os;
        os << "measured value " << result.measured_value << " is below the threshold "
           << threshold << " (eps " << eps << ")";
        result.reason = os.str();
    }
    return result;
}

BestResponse best_response(const ProtocolSpec& spec, const VerifierProgram& verifier,
                           const ProverStrategy& provers, const PriorEntanglement& prior,
                           int prover_index, int round, double tol) {
    const std::vector<Op> ops = materialize(spec, verifier, provers);
    size_t idx = ops.size();
    for (size_t t = 0; t < ops.size(); ++t) {
        if (ops[t].prover == prover_index && ops[t].round == round) {
            idx = t;
            break;
        }
    }
    if (idx == ops.size()) {
        throw ContractError("no such prover turn in the schedule");
    }

    // Everything before the free slot is fixed for the whole search.
    PureState before = initial_state(spec, prior);
    for (size_t t = 0; t < idx; ++t) {
        apply_unitary_in_place(before, ops[t].qubits, ops[t].matrix);
    }
    const ComplexMatrix before_rows = amplitude_matrix(before, ops[idx].qubits);

    // One pass: acceptance of the candidate, and the environment operator
    // from running the projected state backwards through the tail.
    auto evaluate = [&](const ComplexMatrix& u, ComplexMatrix* environment) {
        PureState state = apply_unitary(before, ops[idx].qubits, u);
        for (size_t t = idx + 1; t < ops.size(); ++t) {
            apply_unitary_in_place(state, ops[t].qubits, ops[t].matrix);
        }
        const double value = project_accept(state, spec.output_qubit);
        if (environment) {
            if (value < 1e-30) {
                environment->resize(0, 0);
                return value;
            }
            state.amplitudes /= std::sqrt(value);  // keep the state type's norm contract
            for (size_t t = ops.size(); t-- > idx + 1;) {
                apply_unitary_in_place(state, ops[t].qubits,
                                       ComplexMatrix(ops[t].matrix.adjoint()));
            }
            *environment = amplitude_matrix(state, ops[idx].qubits) * before_rows.adjoint();
        }
        return value;
    };

    BestResponse best;
    best.unitary = ops[idx].matrix;
    ComplexMatrix environment;
    best.value = evaluate(best.unitary, &environment);

    const int cap = 200;
    for (int iter = 1; iter <= cap; ++iter) {
        best.iterations = iter;
        if (environment.size() == 0) {
            // Zero functional: no direction to improve along. Hand back the
            // identity as the canonical representative.
            const std::ptrdiff_t dim = best.unitary.rows();
            best.unitary = ComplexMatrix::Identity(dim, dim);
            best.value = evaluate(best.unitary, nullptr);
            best.degenerate = true;
            return best;
        }
        const ComplexMatrix candidate = polar_unitary(environment);
        ComplexMatrix next_environment;
        const double previous = best.value;
        const double value = evaluate(candidate, &next_environment);
        if (value > best.value) {
            best.unitary = candidate;
            best.value = value;
        }
        if (value < previous + tol) {
            break;  // the majorization step stopped paying off
        }
        environment = std::move(next_environment);
    }
    return best;
}

OptimizationResult optimize_provers(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                    const PriorEntanglement& prior,
                                    const OptimizerConfig& config) {
    if (config.restarts < 1) {
        throw ContractError("optimizer needs at least one restart");
    }
    const int rounds = spec.prover_turn_count();
    const std::ptrdiff_t dim = std::ptrdiff_t(1) << (spec.q_M + spec.q_P);

    OptimizationResult result;
    result.restarts_used = config.restarts;
    double best_value = -1.0;

    for (int r = 0; r < config.restarts; ++r) {
        ProverStrategy current;
        current.turns.assign(static_cast<size_t>(spec.k), {});
        Rng rng(config.seed + static_cast<std::uint64_t>(r));
        for (int i = 0; i < spec.k; ++i) {
            for (int j = 0; j < rounds; ++j) {
                current.turns[static_cast<size_t>(i)].push_back(
                    r == 0 ? ComplexMatrix::Identity(dim, dim) : random_unitary(dim, rng));
            }
        }

        std::vector<double> trajectory;
        double sweep_value = run_protocol(spec, verifier, current, prior).acceptance;
        bool converged = false;
        for (int s = 0; s < config.sweeps; ++s) {
            for (int i = 1; i <= spec.k; ++i) {
                for (int j = 1; j <= rounds; ++j) {
                    BestResponse br =
                        best_response(spec, verifier, current, prior, i, j, config.tol);
                    current.turns[static_cast<size_t>(i - 1)][static_cast<size_t>(j - 1)] =
                        br.unitary;
                    trajectory.push_back(br.value);
                }
            }
            const double after = trajectory.back();
            if (std::abs(after - sweep_value) < config.tol) {
                converged = true;
                break;
            }
            sweep_value = after;
        }
        const double final_value = trajectory.empty() ? sweep_value : trajectory.back();
        if (final_value > best_value) {
            best_value = final_value;
            result.best.provers = current;
            result.best.prior = prior;
            result.best.claimed_value = final_value;
            result.trajectory = trajectory;
            result.converged = converged;
        }
    }
    return result;
}

}  // namespace qmip
