// Command-line front end: wires the file formats to the library and keeps a
// uniform exit-code contract (0 ok, 2 bad input, 3 over the size cap,
// 4 certificate rejected).
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qmip/compression.hpp"
#include "qmip/errors.hpp"
#include "qmip/io.hpp"
#include "qmip/optimizer.hpp"
#include "qmip/protocol.hpp"
#include "qmip/states.hpp"
#include "qmip/transforms.hpp"

namespace {

using nlohmann::json;
using namespace qmip;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitReject = 4;

ProtocolFile load_checked(const std::string& path) {
    ProtocolFile file = load_protocol(path);
    const std::vector<std::string> problems =
        validate_protocol(file.spec, file.verifier, file.provers, file.prior);
    if (!problems.empty()) {
        std::string all = path + ":";
        for (const std::string& p : problems) {
            all += "\n  " + p;
        }
        throw InputError(all);
    }
    return file;
}

struct SimulateArgs {
    std::string protocol;
    std::string prior;
    bool as_json = false;
};

int cmd_simulate(const SimulateArgs& a) {
    ProtocolFile file = load_checked(a.protocol);
    if (!a.prior.empty()) {
        file.prior = load_prior(a.prior, file.spec.k, file.spec.q_ent);
        const auto problems = validate_protocol(file.spec, file.verifier, file.provers, file.prior);
        if (!problems.empty()) {
            throw InputError(a.prior + ": " + problems.front());
        }
    }
    const RunResult r = run_protocol(file.spec, file.verifier, file.provers, file.prior);
    if (a.as_json) {
        json out;
        out["acceptance"] = r.acceptance;
        out["rounds"] = r.step_norms;
        std::cout << out.dump() << '\n';
    } else {
        std::cout << "acceptance: " << format_probability(r.acceptance) << '\n';
        for (size_t i = 0; i < r.step_norms.size(); ++i) {
            std::cout << "round " << (i + 1)
                      << " norm: " << format_probability(r.step_norms[i]) << '\n';
        }
    }
    return kExitOk;
}

struct CompressArgs {
    std::string protocol;
    std::string prover = "all";
    std::string out;
    std::string trace;
};

json trace_rounds_json(const CompressionTrace& trace) {
    json rounds = json::array();
    for (size_t j = 0; j < trace.rounds.size(); ++j) {
        rounds.push_back(json{{"round", j + 1}, {"schmidt_rank", trace.rounds[j].schmidt_rank}});
    }
    return json{{"prover", trace.prover}, {"budget", trace.budget}, {"rounds", rounds}};
}

void print_prover_report(const CompressionTrace& trace, int old_q_P, int new_q_P) {
    std::cout << "prover " << trace.prover << ": q_P " << old_q_P << " -> " << new_q_P << '\n';
    for (size_t j = 0; j < trace.rounds.size(); ++j) {
        std::cout << "prover " << trace.prover << " round " << (j + 1)
                  << " rank: " << trace.rounds[j].schmidt_rank << '\n';
    }
}

int cmd_compress(const CompressArgs& a) {
    ProtocolFile file = load_checked(a.protocol);
    const double before =
        run_protocol(file.spec, file.verifier, file.provers, file.prior).acceptance;
    json trace_doc;
    trace_doc["provers"] = json::array();

    double after = before;
    ProtocolFile out_file = file;

    if (a.prover == "all" || file.spec.k == 1) {
        if (file.spec.k == 1) {
            const CompressedProver cp =
                compress_single_prover(file.spec, file.verifier, file.provers.turns.at(0));
            print_prover_report(cp.trace, file.spec.q_P, cp.q_P);
            trace_doc["provers"].push_back(trace_rounds_json(cp.trace));
            out_file.spec.q_P = cp.q_P;
            out_file.spec.q_ent = 0;
            out_file.prior = PriorEntanglement::none();
            out_file.provers.turns = {cp.turns};
            after = run_protocol(out_file.spec, out_file.verifier, out_file.provers).acceptance;
        } else {
            const CompressedProtocol cp =
                compress_all_provers(file.spec, file.verifier, file.provers, file.prior);
            for (const CompressedProver& p : cp.per_prover) {
                print_prover_report(p.trace, file.spec.q_P, cp.spec.q_P);
                trace_doc["provers"].push_back(trace_rounds_json(p.trace));
            }
            out_file.spec = cp.spec;
            out_file.provers = cp.provers;
            after = cp.compressed_acceptance;
        }
    } else {
        int index = 0;
        try {
            index = std::stoi(a.prover);
        } catch (const std::exception&) {
            throw InputError("--prover wants an index or \"all\", got \"" + a.prover + "\"");
        }
        if (index < 1 || index > file.spec.k) {
            throw InputError("--prover index out of range");
        }
        const CompressedProver cp =
            compress_prover(file.spec, file.verifier, file.provers, index, file.prior);
        print_prover_report(cp.trace, file.spec.q_P, cp.q_P);
        trace_doc["provers"].push_back(trace_rounds_json(cp.trace));
        // Other provers keep the original width, so the swapped-in turns are
        // the full-width replacements and q_P stays put in the output file.
        // An already-fitting prover has no rounds in the trace and keeps its
        // input turns.
        if (!cp.trace.rounds.empty()) {
            std::vector<ComplexMatrix> swapped;
            for (const CompressionRound& r : cp.trace.rounds) {
                swapped.push_back(r.replacement);
            }
            out_file.provers.turns.at(static_cast<size_t>(index - 1)) = swapped;
        }
        after = run_protocol(out_file.spec, out_file.verifier, out_file.provers, out_file.prior)
                    .acceptance;
    }

    std::cout << "acceptance before: " << format_probability(before) << '\n';
    std::cout << "acceptance after: " << format_probability(after) << '\n';
    std::cout << "acceptance delta: " << format_quantity(std::abs(after - before)) << '\n';
    if (!a.out.empty()) {
        save_protocol(out_file, a.out);
    }
    if (!a.trace.empty()) {
        std::ofstream tf(a.trace);
        if (!tf) {
            throw InputError("cannot write " + a.trace);
        }
        tf << trace_doc.dump() << '\n';
    }
    return kExitOk;
}

struct ToQocArgs {
    std::string protocol;
    std::string out;
};

int cmd_to_qoc(const ToQocArgs& a) {
    ProtocolFile file = load_checked(a.protocol);
    const double original =
        run_protocol(file.spec, file.verifier, file.provers, file.prior).acceptance;

    if (file.spec.q_P > file.spec.m * file.spec.q_M) {
        const CompressedProtocol cp =
            (file.spec.k == 1)
                ? [&] {
                      const CompressedProver sp = compress_single_prover(
                          file.spec, file.verifier, file.provers.turns.at(0));
                      CompressedProtocol whole;
                      whole.spec = file.spec;
                      whole.spec.q_P = sp.q_P;
                      whole.spec.q_ent = 0;
                      whole.provers.turns = {sp.turns};
                      return whole;
                  }()
                : compress_all_provers(file.spec, file.verifier, file.provers, file.prior);
        std::cout << "compressed q_P " << file.spec.q_P << " -> " << cp.spec.q_P << '\n';
        file.spec = cp.spec;
        file.provers = cp.provers;
        if (file.spec.q_ent == 0) {
            file.prior = PriorEntanglement::none();
        }
    }

    const OracleCircuitSpec qoc = to_oracle_circuit(file.spec, file.verifier);
    const std::vector<ComplexMatrix> oracles = oracle_from_provers(file.spec, file.provers);
    const double oracle_value = run_oracle_circuit(qoc, oracles);

    std::cout << "oracle calls: " << qoc.oracle_calls() << '\n';
    std::cout << "verifier qubits: " << qoc.q_V_qoc() << '\n';
    std::cout << "oracle interface qubits: " << qoc.q_O_qoc() << '\n';
    std::cout << "acceptance (message form): " << format_probability(original) << '\n';
    std::cout << "acceptance (oracle form): " << format_probability(oracle_value) << '\n';

    if (!a.out.empty()) {
        const LoweredProtocol lowered = to_protocol(qoc, oracles);
        const double lowered_value =
            run_protocol(lowered.spec, lowered.verifier, lowered.provers).acceptance;
        std::cout << "acceptance (lowered form): " << format_probability(lowered_value) << '\n';
        ProtocolFile out_file;
        out_file.spec = lowered.spec;
        out_file.verifier = lowered.verifier;
        out_file.provers = lowered.provers;
        save_protocol(out_file, a.out);
    }
    return kExitOk;
}

struct EmbedArgs {
    std::string game;
    std::string out;
    int q_ent = 0;
    int q_P = -1;
};

int cmd_embed(const EmbedArgs& a) {
    const ClassicalTwoProverGame game = load_game(a.game);
    EmbedOptions opt;
    opt.q_ent = a.q_ent;
    opt.q_P = a.q_P;
    const EmbeddedGame eg = embed_classical_game(game, opt);

    std::cout << "message qubits: " << eg.q_M << '\n';
    std::cout << "tape qubits: " << eg.tape_qubits << '\n';
    std::cout << "verifier qubits: " << eg.spec.q_V << '\n';
    std::cout << "total qubits: " << eg.spec.total_qubits() << '\n';
    std::cout << "classical value: " << format_probability(classical_value(game)) << '\n';

    if (!a.out.empty()) {
        ProtocolFile out_file;
        out_file.spec = eg.spec;
        out_file.verifier = eg.verifier;
        const std::ptrdiff_t dim = std::ptrdiff_t(1) << (eg.spec.q_M + eg.spec.q_P);
        const int rounds = eg.spec.prover_turn_count();
        for (int i = 0; i < eg.spec.k; ++i) {
            out_file.provers.turns.emplace_back(
                static_cast<size_t>(rounds), ComplexMatrix::Identity(dim, dim));
        }
        if (eg.spec.q_ent > 0) {
            out_file.prior = PriorEntanglement::maximally_entangled(eg.spec.k, eg.spec.q_ent);
        }
        save_protocol(out_file, a.out);
    }
    return kExitOk;
}

struct OptimizeArgs {
    std::string protocol;
    std::string cert_out;
    OptimizerConfig config;
};

int cmd_optimize(const OptimizeArgs& a) {
    const ProtocolFile file = load_checked(a.protocol);
    const OptimizationResult r =
        optimize_provers(file.spec, file.verifier, file.prior, a.config);
    std::cout << "value: " << format_probability(r.best.claimed_value) << '\n';
    std::cout << "restarts: " << r.restarts_used << '\n';
    std::cout << "updates: " << r.trajectory.size() << '\n';
    std::cout << "converged: " << (r.converged ? "yes" : "no") << '\n';
    if (!a.cert_out.empty()) {
        save_certificate(r.best, a.cert_out);
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string protocol;
    std::string certificate;
    double threshold = 0.5;
    double eps = 0.0;
};

int cmd_verify(const VerifyArgs& a) {
    const ProtocolFile file = load_checked(a.protocol);
    Certificate cert = load_certificate(a.certificate);
    if (cert.prior.absent()) {
        cert.prior = file.prior;
    }
    const VerificationResult r =
        verify_certificate(file.spec, file.verifier, cert, a.threshold, a.eps);
    std::cout << "claimed: " << format_probability(r.claimed_value) << '\n';
    std::cout << "measured: " << format_probability(r.measured_value) << '\n';
    std::cout << "threshold: " << format_probability(a.threshold) << '\n';
    std::cout << "accepted: " << (r.accepted ? "yes" : "no") << '\n';
    if (!r.accepted) {
        std::cout << "reason: " << r.reason << '\n';
        return kExitReject;
    }
    return kExitOk;
}

struct EntanglementArgs {
    std::string protocol;
    std::string state;
    std::string cut;
};

std::vector<std::vector<std::string>> parse_cut(const std::string& cut) {
    std::vector<std::vector<std::string>> parts;
    std::vector<std::string> current;
    std::string token;
    const auto flush_token = [&] {
        size_t b = token.find_first_not_of(' ');
        size_t e = token.find_last_not_of(' ');
        if (b == std::string::npos) {
            throw InputError("cut has an empty register name");
        }
        current.push_back(token.substr(b, e - b + 1));
        token.clear();
    };
    for (char c : cut) {
        if (c == ',') {
            flush_token();
        } else if (c == '|') {
            flush_token();
            parts.push_back(std::move(current));
            current.clear();
        } else {
            token += c;
        }
    }
    flush_token();
    parts.push_back(std::move(current));
    return parts;
}

int cmd_entanglement(const EntanglementArgs& a) {
    const ProtocolFile file = load_checked(a.protocol);
    const RegisterLayout layout = file.spec.layout();
    PureState state = a.state.empty()
                          ? initial_state(file.spec, file.prior)
                          : PureState(layout, load_amplitudes(a.state));

    const auto parts = parse_cut(a.cut);
    if (parts.size() > 3) {
        throw InputError("cut supports at most three parts");
    }
    if (parts.size() > 1) {
        // A multi-part cut must name every register exactly once.
        std::vector<std::string> seen;
        for (const auto& part : parts) {
            for (const auto& name : part) {
                if (std::find(seen.begin(), seen.end(), name) != seen.end()) {
                    throw InputError("cut names register " + name + " twice");
                }
                seen.push_back(name);
            }
        }
        if (seen.size() != layout.registers().size()) {
            throw InputError("a multi-part cut must cover every register");
        }
    }
    std::cout << "ent2: " << ent2(state, parts.front()) << '\n';
    if (parts.size() == 3) {
        std::cout << "ent3_upper_bound: " << ent3_upper_bound(state, parts) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum multi-prover protocol toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "run a protocol and report acceptance");
    sim_cmd->add_option("protocol", sim.protocol, "protocol file")->required();
    sim_cmd->add_option("--prior", sim.prior, "prior entanglement file overriding the protocol's");
    sim_cmd->add_flag("--json", sim.as_json, "emit a JSON report");

    CompressArgs comp;
    CLI::App* comp_cmd =
        app.add_subcommand("compress", "rebuild provers at the proven private-register budget");
    comp_cmd->add_option("protocol", comp.protocol, "protocol file")->required();
    comp_cmd->add_option("--prover", comp.prover, "prover index (1-based) or \"all\"");
    comp_cmd->add_option("--out", comp.out, "write the rebuilt protocol here");
    comp_cmd->add_option("--trace", comp.trace, "write a JSON compression trace here");

    ToQocArgs qoc;
    CLI::App* qoc_cmd =
        app.add_subcommand("to-qoc", "re-address the protocol as an oracle-call circuit");
    qoc_cmd->add_option("protocol", qoc.protocol, "protocol file")->required();
    qoc_cmd->add_option("--out", qoc.out, "write the lowered one-prover protocol here");

    EmbedArgs emb;
    CLI::App* emb_cmd =
        app.add_subcommand("embed", "turn a classical two-prover game into a protocol");
    emb_cmd->add_option("game", emb.game, "game file")->required();
    emb_cmd->add_option("--out", emb.out, "write the protocol (identity provers) here");
    emb_cmd->add_option("--q-ent", emb.q_ent, "prior-entanglement qubits per prover");
    emb_cmd->add_option("--q-p", emb.q_P, "private qubits per prover (default: fits the messages)");

    OptimizeArgs opt;
    CLI::App* opt_cmd = app.add_subcommand("optimize", "search for a high-value prover strategy");
    opt_cmd->add_option("protocol", opt.protocol, "protocol file")->required();
    opt_cmd->add_option("--restarts", opt.config.restarts, "number of starting points");
    opt_cmd->add_option("--sweeps", opt.config.sweeps, "sweep cap per restart");
    opt_cmd->add_option("--seed", opt.config.seed, "random seed");
    opt_cmd->add_option("--tol", opt.config.tol, "improvement tolerance");
    opt_cmd->add_option("--cert-out", opt.cert_out, "write the best certificate here");

    VerifyArgs ver;
    CLI::App* ver_cmd = app.add_subcommand("verify", "check a strategy certificate");
    ver_cmd->add_option("protocol", ver.protocol, "protocol file")->required();
    ver_cmd->add_option("certificate", ver.certificate, "certificate file")->required();
    ver_cmd->add_option("--threshold", ver.threshold, "acceptance threshold");
    ver_cmd->add_option("--eps", ver.eps, "threshold slack");

    EntanglementArgs ent;
    CLI::App* ent_cmd = app.add_subcommand("entanglement", "report entanglement across a cut");
    ent_cmd->add_option("protocol", ent.protocol, "protocol file")->required();
    ent_cmd->add_option("--state", ent.state, "amplitude file (default: the initial state)");
    ent_cmd->add_option("--cut", ent.cut, "register cut, e.g. \"P1\" or \"V|M1,M2|P1\"")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (comp_cmd->parsed()) return cmd_compress(comp);
        if (qoc_cmd->parsed()) return cmd_to_qoc(qoc);
        if (emb_cmd->parsed()) return cmd_embed(emb);
        if (opt_cmd->parsed()) return cmd_optimize(opt);
        if (ver_cmd->parsed()) return cmd_verify(ver);
        if (ent_cmd->parsed()) return cmd_entanglement(ent);
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
