#pragma once

#include "qmip/protocol.hpp"

namespace qmip {

// A concrete strategy submitted for exact evaluation: the provers' turn
// unitaries, whatever entanglement they claim to share, and the value they
// claim to reach.
struct Certificate {
    ProverStrategy provers;
    PriorEntanglement prior;
    double claimed_value = 0.0;
};

struct VerificationResult {
    bool accepted = false;
    double measured_value = 0.0;
    double claimed_value = 0.0;
    std::string reason;  // filled in on rejection
};

// Evaluates the certificate exactly and accepts iff the measured acceptance
// exceeds threshold - eps. Turn matrices within 1e-6 of unitary (max-norm of
// U*U - I) are snapped to their polar factor first; anything farther off is
// rejected without being run.
VerificationResult verify_certificate(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                      const Certificate& cert, double threshold, double eps = 0.0);

struct BestResponse {
    ComplexMatrix unitary;  // on M_i (x) P_i
    double value = 0.0;     // acceptance with the returned unitary in place
    bool degenerate = false;
    int iterations = 0;
};

// Maximizes acceptance over prover i's round-j unitary with everything else
// fixed, by iterating the polar factor of the environment operator (the
// acceptance functional reshaped to the turn's index space). The returned
// value never falls more than 1e-12 below the starting one. A zero
// environment (acceptance identically zero at this linearization) returns
// the identity with the degenerate flag set.
BestResponse best_response(const ProtocolSpec& spec, const VerifierProgram& verifier,
                           const ProverStrategy& provers, const PriorEntanglement& prior,
                           int prover_index, int round, double tol = 1e-12);

struct OptimizerConfig {
    int restarts = 4;
    int sweeps = 64;
    std::uint64_t seed = 1;
    double tol = 1e-11;
};

struct OptimizationResult {
    Certificate best;
    // Acceptance after every best-response update of the winning restart.
    std::vector<double> trajectory;
    int restarts_used = 0;
    bool converged = false;  // the winning restart stalled before the sweep cap
};

// See-saw search: from several deterministic starting points (identity
// first, then seeded Haar-random strategies), cycles best_response over all
// (prover, round) slots until the value stops improving by more than tol or
// the sweep cap is hit. Result is the best restart; ties keep the earliest.
OptimizationResult optimize_provers(const ProtocolSpec& spec, const VerifierProgram& verifier,
                                    const PriorEntanglement& prior = {},
                                    const OptimizerConfig& config = {});

}  // namespace qmip
