#include "qmip/io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace qmip {
namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    out << j.dump() << '\n';
    if (!out) {
        throw InputError("write to " + path + " failed");
    }
}

Complex complex_from_json(const json& j, const std::string& where) {
    if (j.is_number()) {
        return Complex(j.get<double>(), 0.0);
    }
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return Complex(j[0].get<double>(), j[1].get<double>());
    }
    throw InputError(where + ": expected a number or an [re, im] pair");
}

json complex_to_json(const Complex& z) {
    return json::array({z.real(), z.imag()});
}

ComplexVector vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) {
        throw InputError(where + ": expected an array of amplitudes");
    }
    ComplexVector v(static_cast<std::ptrdiff_t>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        v(static_cast<std::ptrdiff_t>(i)) = complex_from_json(j[i], where);
    }
    return v;
}

json vector_to_json(const ComplexVector& v) {
    json j = json::array();
    for (std::ptrdiff_t i = 0; i < v.size(); ++i) {
        j.push_back(complex_to_json(v(i)));
    }
    return j;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        throw InputError(where + ": expected a nonempty array of rows");
    }
    const size_t rows = j.size();
    size_t cols = 0;
    ComplexMatrix m;
    for (size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array()) {
            throw InputError(where + ": row " + std::to_string(r) + " is not an array");
        }
        if (r == 0) {
            cols = j[r].size();
            m.resize(static_cast<std::ptrdiff_t>(rows), static_cast<std::ptrdiff_t>(cols));
        } else if (j[r].size() != cols) {
            throw InputError(where + ": ragged rows");
        }
        for (size_t c = 0; c < cols; ++c) {
            m(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(c)) =
                complex_from_json(j[r][c], where);
        }
    }
    return m;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::ptrdiff_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::ptrdiff_t c = 0; c < m.cols(); ++c) {
            row.push_back(complex_to_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Gate gate_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind")) {
        throw InputError(where + ": gates need a \"kind\"");
    }
    const std::string kind = j["kind"].get<std::string>();
    std::vector<int> targets;
    if (j.contains("targets")) {
        for (const auto& t : j["targets"]) {
            if (!t.is_number_integer()) {
                throw InputError(where + ": gate targets must be integers");
            }
            targets.push_back(t.get<int>());
        }
    }
    try {
        if (kind == "h") {
            if (targets.size() != 1) {
                throw GateError("hadamard takes one target");
            }
            return Gate::hadamard(targets[0]);
        }
        if (kind == "sz") {
            if (targets.size() != 1) {
                throw GateError("sz takes one target");
            }
            return Gate::sqrt_z(targets[0]);
        }
        if (kind == "toffoli") {
            if (targets.size() != 3) {
                throw GateError("toffoli takes three targets");
            }
            return Gate::toffoli(targets[0], targets[1], targets[2]);
        }
        if (kind == "unitary") {
            if (!j.contains("matrix")) {
                throw InputError(where + ": unitary gates need a \"matrix\"");
            }
            return Gate::unitary(targets, matrix_from_json(j["matrix"], where));
        }
    } catch (const GateError& e) {
        throw InputError(where + ": " + e.what());
    }
    throw InputError(where + ": unknown gate kind \"" + kind + "\"");
}

json gate_to_json(const Gate& g) {
    json j;
    switch (g.kind) {
        case GateKind::Hadamard:
            j["kind"] = "h";
            break;
        case GateKind::SqrtZ:
            j["kind"] = "sz";
            break;
        case GateKind::Toffoli:
            j["kind"] = "toffoli";
            break;
        case GateKind::Unitary:
            j["kind"] = "unitary";
            j["matrix"] = matrix_to_json(g.matrix);
            break;
    }
    j["targets"] = g.targets;
    return j;
}

Turn turn_from_json(const json& j, const std::string& where) {
    if (j.is_object() && j.contains("matrix") && !j.contains("gates")) {
        return Turn{matrix_from_json(j["matrix"], where)};
    }
    if (j.is_object() && j.contains("gates") && !j.contains("matrix")) {
        GateList list;
        size_t gi = 0;
        for (const auto& g : j["gates"]) {
            list.gates.push_back(gate_from_json(g, where + ", gate " + std::to_string(++gi)));
        }
        return Turn{std::move(list)};
    }
    throw InputError(where + ": a turn is {\"gates\": [...]} or {\"matrix\": [...]}");
}

json turn_to_json(const Turn& t) {
    json j;
    if (const GateList* g = std::get_if<GateList>(&t)) {
        json gates = json::array();
        for (const Gate& gate : g->gates) {
            gates.push_back(gate_to_json(gate));
        }
        j["gates"] = std::move(gates);
    } else {
        j["matrix"] = matrix_to_json(std::get<ComplexMatrix>(t));
    }
    return j;
}

// Prover turns are stored like verifier turns but must end up as matrices;
// gate-list turns are compiled at the prover's width.
ComplexMatrix prover_turn_from_json(const json& j, int width, const std::string& where) {
    Turn t = turn_from_json(j, where);
    if (const GateList* g = std::get_if<GateList>(&t)) {
        try {
            return compile_gates(*g, width);
        } catch (const GateError& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    return std::get<ComplexMatrix>(std::move(t));
}

int int_field(const json& j, const char* name, const std::string& where) {
    if (!j.contains(name) || !j[name].is_number_integer()) {
        throw InputError(where + ": missing integer field \"" + name + "\"");
    }
    return j[name].get<int>();
}

PriorEntanglement prior_from_json(const json& j, int k, int q_ent, const std::string& where) {
    if (j.is_null()) {
        return PriorEntanglement::none();
    }
    if (j.is_object() && j.contains("maximally_entangled")) {
        if (!j["maximally_entangled"].get<bool>()) {
            return PriorEntanglement::none();
        }
        return PriorEntanglement::maximally_entangled(k, q_ent);
    }
    if (j.is_object() && j.contains("state")) {
        return PriorEntanglement::of(vector_from_json(j["state"], where));
    }
    throw InputError(where + ": expected {\"state\": [...]} or {\"maximally_entangled\": true}");
}

}  // namespace

ProtocolFile load_protocol(const std::string& path) {
    const json j = parse_file(path);
    ProtocolFile file;
    file.spec.k = int_field(j, "k", path);
    file.spec.m = int_field(j, "m", path);
    file.spec.q_V = int_field(j, "q_V", path);
    file.spec.q_M = int_field(j, "q_M", path);
    file.spec.q_P = int_field(j, "q_P", path);
    file.spec.q_ent = j.contains("q_ent") ? int_field(j, "q_ent", path) : 0;
    file.spec.output_qubit = j.contains("output_qubit") ? int_field(j, "output_qubit", path) : 0;

    if (!j.contains("verifier") || !j["verifier"].is_array()) {
        throw InputError(path + ": missing \"verifier\" turn array");
    }
    size_t ti = 0;
    for (const auto& t : j["verifier"]) {
        file.verifier.turns.push_back(
            turn_from_json(t, path + ": verifier turn " + std::to_string(++ti)));
    }

    if (!j.contains("provers") || !j["provers"].is_array()) {
        throw InputError(path + ": missing \"provers\" array");
    }
    const int width = file.spec.q_M + file.spec.q_P;
    size_t pi = 0;
    for (const auto& list : j["provers"]) {
        ++pi;
        if (!list.is_array()) {
            throw InputError(path + ": prover " + std::to_string(pi) + " is not a turn array");
        }
        std::vector<ComplexMatrix> turns;
        size_t tj = 0;
        for (const auto& t : list) {
            turns.push_back(prover_turn_from_json(
                t, width,
                path + ": prover " + std::to_string(pi) + " turn " + std::to_string(++tj)));
        }
        file.provers.turns.push_back(std::move(turns));
    }

    if (j.contains("prior")) {
        file.prior = prior_from_json(j["prior"], file.spec.k, file.spec.q_ent, path + ": prior");
    }
    if (j.contains("metadata") && j["metadata"].is_object()) {
        const auto& meta = j["metadata"];
        if (meta.contains("input_x")) {
            file.input_x = meta["input_x"].get<std::string>();
        }
        if (meta.contains("label")) {
            file.label = meta["label"].get<std::string>();
        }
    }
    return file;
}

void save_protocol(const ProtocolFile& file, const std::string& path) {
    json j;
    j["k"] = file.spec.k;
    j["m"] = file.spec.m;
    j["q_V"] = file.spec.q_V;
    j["q_M"] = file.spec.q_M;
    j["q_P"] = file.spec.q_P;
    j["q_ent"] = file.spec.q_ent;
    j["output_qubit"] = file.spec.output_qubit;
    json verifier = json::array();
    for (const Turn& t : file.verifier.turns) {
        verifier.push_back(turn_to_json(t));
    }
    j["verifier"] = std::move(verifier);
    json provers = json::array();
    for (const auto& list : file.provers.turns) {
        json turns = json::array();
        for (const ComplexMatrix& m : list) {
            json t;
            t["matrix"] = matrix_to_json(m);
            turns.push_back(std::move(t));
        }
        provers.push_back(std::move(turns));
    }
    j["provers"] = std::move(provers);
    if (!file.prior.absent()) {
        j["prior"] = json{{"state", vector_to_json(file.prior.state)}};
    }
    if (!file.input_x.empty() || !file.label.empty()) {
        json meta;
        if (!file.input_x.empty()) {
            meta["input_x"] = file.input_x;
        }
        if (!file.label.empty()) {
            meta["label"] = file.label;
        }
        j["metadata"] = std::move(meta);
    }
    write_file(j, path);
}

ClassicalTwoProverGame load_game(const std::string& path) {
    const json j = parse_file(path);
    ClassicalTwoProverGame game;
    if (!j.contains("questions") || !j["questions"].is_array() || j["questions"].size() != 2 ||
        !j.contains("answers") || !j["answers"].is_array() || j["answers"].size() != 2) {
        throw InputError(path + ": need \"questions\": [n1, n2] and \"answers\": [n1, n2]");
    }
    game.question_sizes[0] = j["questions"][0].get<int>();
    game.question_sizes[1] = j["questions"][1].get<int>();
    game.answer_sizes[0] = j["answers"][0].get<int>();
    game.answer_sizes[1] = j["answers"][1].get<int>();

    if (!j.contains("distribution") || !j["distribution"].is_array() ||
        j["distribution"].empty()) {
        throw InputError(path + ": missing \"distribution\" rows");
    }
    int tape = 0;
    for (const auto& row : j["distribution"]) {
        tape = std::max(tape, int_field(row, "v", path + ": distribution") + 1);
    }
    game.tape_size = tape;
    game.probs.assign(static_cast<size_t>(tape) * game.question_sizes[0] * game.question_sizes[1],
                      0.0);
    for (const auto& row : j["distribution"]) {
        const int v = int_field(row, "v", path + ": distribution");
        const int q1 = int_field(row, "q1", path + ": distribution");
        const int q2 = int_field(row, "q2", path + ": distribution");
        if (v < 0 || q1 < 0 || q1 >= game.question_sizes[0] || q2 < 0 ||
            q2 >= game.question_sizes[1]) {
            throw InputError(path + ": distribution row outside the alphabets");
        }
        if (!row.contains("p") || !row["p"].is_number()) {
            throw InputError(path + ": distribution rows need a probability \"p\"");
        }
        const size_t idx =
            (static_cast<size_t>(v) * game.question_sizes[0] + static_cast<size_t>(q1)) *
                game.question_sizes[1] +
            static_cast<size_t>(q2);
        game.probs[idx] += row["p"].get<double>();
    }

    game.accept_table.assign(game.probs.size() * game.answer_sizes[0] * game.answer_sizes[1], 0);
    if (!j.contains("accept") || !j["accept"].is_array()) {
        throw InputError(path + ": missing \"accept\" truth-table rows");
    }
    for (const auto& row : j["accept"]) {
        const int v = int_field(row, "v", path + ": accept");
        const int q1 = int_field(row, "q1", path + ": accept");
        const int q2 = int_field(row, "q2", path + ": accept");
        const int a1 = int_field(row, "a1", path + ": accept");
        const int a2 = int_field(row, "a2", path + ": accept");
        if (v < 0 || v >= game.tape_size || q1 < 0 || q1 >= game.question_sizes[0] || q2 < 0 ||
            q2 >= game.question_sizes[1] || a1 < 0 || a1 >= game.answer_sizes[0] || a2 < 0 ||
            a2 >= game.answer_sizes[1]) {
            throw InputError(path + ": accept row outside the alphabets");
        }
        if (!row.contains("accept") || !row["accept"].is_boolean()) {
            throw InputError(path + ": accept rows need a boolean \"accept\"");
        }
        const size_t idx =
            (((static_cast<size_t>(v) * game.question_sizes[0] + static_cast<size_t>(q1)) *
                  game.question_sizes[1] +
              static_cast<size_t>(q2)) *
                 game.answer_sizes[0] +
             static_cast<size_t>(a1)) *
                game.answer_sizes[1] +
            static_cast<size_t>(a2);
        game.accept_table[idx] = row["accept"].get<bool>() ? 1 : 0;
    }
    try {
        game.check();
    } catch (const Error& e) {
        throw InputError(path + ": " + e.what());
    }
    return game;
}

void save_game(const ClassicalTwoProverGame& game, const std::string& path) {
    json j;
    j["questions"] = {game.question_sizes[0], game.question_sizes[1]};
    j["answers"] = {game.answer_sizes[0], game.answer_sizes[1]};
    json dist = json::array();
    json acc = json::array();
    for (int v = 0; v < game.tape_size; ++v) {
        for (int q1 = 0; q1 < game.question_sizes[0]; ++q1) {
            for (int q2 = 0; q2 < game.question_sizes[1]; ++q2) {
                const double p = game.probability(v, q1, q2);
                if (p != 0.0) {
                    dist.push_back(json{{"v", v}, {"q1", q1}, {"q2", q2}, {"p", p}});
                }
                for (int a1 = 0; a1 < game.answer_sizes[0]; ++a1) {
                    for (int a2 = 0; a2 < game.answer_sizes[1]; ++a2) {
                        if (game.accepts(v, q1, q2, a1, a2)) {
                            acc.push_back(json{{"v", v},
                                               {"q1", q1},
                                               {"q2", q2},
                                               {"a1", a1},
                                               {"a2", a2},
                                               {"accept", true}});
                        }
                    }
                }
            }
        }
    }
    j["distribution"] = std::move(dist);
    j["accept"] = std::move(acc);
    write_file(j, path);
}

Certificate load_certificate(const std::string& path) {
    const json j = parse_file(path);
    Certificate cert;
    if (!j.contains("claimed_value") || !j["claimed_value"].is_number()) {
        throw InputError(path + ": missing \"claimed_value\"");
    }
    cert.claimed_value = j["claimed_value"].get<double>();
    if (!j.contains("provers") || !j["provers"].is_array()) {
        throw InputError(path + ": missing \"provers\" array");
    }
    size_t pi = 0;
    for (const auto& list : j["provers"]) {
        ++pi;
        if (!list.is_array()) {
            throw InputError(path + ": prover " + std::to_string(pi) + " is not a turn array");
        }
        std::vector<ComplexMatrix> turns;
        size_t tj = 0;
        for (const auto& t : list) {
            const std::string where =
                path + ": prover " + std::to_string(pi) + " turn " + std::to_string(++tj);
            Turn turn = turn_from_json(t, where);
            if (std::holds_alternative<GateList>(turn)) {
                throw InputError(where + ": certificates carry explicit matrices only");
            }
            turns.push_back(std::get<ComplexMatrix>(std::move(turn)));
        }
        cert.provers.turns.push_back(std::move(turns));
    }
    if (j.contains("prior")) {
        // The certificate does not know k and q_ent; only explicit states
        // make sense here.
        if (!j["prior"].is_object() || !j["prior"].contains("state")) {
            throw InputError(path + ": certificate priors must be explicit {\"state\": [...]}");
        }
        cert.prior = PriorEntanglement::of(vector_from_json(j["prior"]["state"], path + ": prior"));
    }
    return cert;
}

void save_certificate(const Certificate& cert, const std::string& path) {
    json j;
    j["claimed_value"] = cert.claimed_value;
    json provers = json::array();
    for (const auto& list : cert.provers.turns) {
        json turns = json::array();
        for (const ComplexMatrix& m : list) {
            json t;
            t["matrix"] = matrix_to_json(m);
            turns.push_back(std::move(t));
        }
        provers.push_back(std::move(turns));
    }
    j["provers"] = std::move(provers);
    if (!cert.prior.absent()) {
        j["prior"] = json{{"state", vector_to_json(cert.prior.state)}};
    }
    write_file(j, path);
}

PriorEntanglement load_prior(const std::string& path, int k, int q_ent) {
    const json j = parse_file(path);
    return prior_from_json(j, k, q_ent, path);
}

ComplexVector load_amplitudes(const std::string& path) {
    const json j = parse_file(path);
    if (!j.is_object() || !j.contains("state")) {
        throw InputError(path + ": expected {\"state\": [[re,im], ...]}");
    }
    return vector_from_json(j["state"], path);
}

std::string format_probability(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12f", p);
    return buf;
}

std::string format_quantity(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace qmip
