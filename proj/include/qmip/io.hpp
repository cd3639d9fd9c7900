#pragma once

#include <string>

#include "qmip/optimizer.hpp"
#include "qmip/transforms.hpp"

namespace qmip {

// On-disk protocol description. Everything the engine needs to run: shape,
// verifier turns (gate lists or explicit matrices), prover turn matrices,
// optional shared prior, and free-form metadata.
struct ProtocolFile {
    ProtocolSpec spec;
    VerifierProgram verifier;
    ProverStrategy provers;
    PriorEntanglement prior;
    std::string input_x;  // metadata, carried through untouched
    std::string label;
};

ProtocolFile load_protocol(const std::string& path);
void save_protocol(const ProtocolFile& file, const std::string& path);

ClassicalTwoProverGame load_game(const std::string& path);
void save_game(const ClassicalTwoProverGame& game, const std::string& path);

Certificate load_certificate(const std::string& path);
void save_certificate(const Certificate& cert, const std::string& path);

// A prior file holds {"state": [[re,im],...]} or {"maximally_entangled":
// true}; the latter is expanded with the protocol's k and q_ent.
PriorEntanglement load_prior(const std::string& path, int k, int q_ent);

// A bare amplitude vector: {"state": [[re,im],...]}.
ComplexVector load_amplitudes(const std::string& path);

// Report formatting. Probabilities print with 12 fixed decimals so golden
// files stay byte-identical; other quantities get 12 significant digits.
std::string format_probability(double p);
std::string format_quantity(double x);

}  // namespace qmip
