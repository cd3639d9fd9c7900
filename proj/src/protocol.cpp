#include "qmip/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qmip {
namespace {

ComplexMatrix hadamard_matrix() {
    ComplexMatrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

ComplexMatrix sqrt_z_matrix() {
    ComplexMatrix h = ComplexMatrix::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = Complex(0.0, 1.0);
    return h;
}

ComplexMatrix toffoli_matrix() {
    ComplexMatrix t = ComplexMatrix::Identity(8, 8);
    // |110> <-> |111>, with qubit order (control, control, target).
    t(6, 6) = 0.0;
    t(7, 7) = 0.0;
    t(6, 7) = 1.0;
    t(7, 6) = 1.0;
    return t;
}

int expected_target_count(GateKind kind) {
    switch (kind) {
        case GateKind::Hadamard:
        case GateKind::SqrtZ:
            return 1;
        case GateKind::Toffoli:
            return 3;
        case GateKind::Unitary:
            return -1;  // derived from the matrix
    }
    return -1;
}

void check_gate_targets(const Gate& g, int width) {
    const int expected = expected_target_count(g.kind);
    if (expected >= 0 && static_cast<int>(g.targets.size()) != expected) {
        std::ostringstream os;
        os << "gate expects " << expected << " target(s), got " << g.targets.size();
        throw GateError(os.str());
    }
    for (int t : g.targets) {
        if (t < 0 || t >= width) {
            std::ostringstream os;
            os << "gate target " << t << " outside turn space of " << width << " qubit(s)";
            throw GateError(os.str());
        }
    }
    std::vector<int> sorted = g.targets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw GateError("gate targets collide");
    }
}

}  // namespace

Gate Gate::unitary(std::vector<int> targets, ComplexMatrix m) {
    if (m.rows() != m.cols()) {
        throw GateError("explicit gate matrix must be square");
    }
    const std::ptrdiff_t want = std::ptrdiff_t(1) << targets.size();
    if (m.rows() != want) {
        std::ostringstream os;
        os << "explicit gate on " << targets.size() << " qubit(s) needs dimension " << want
           << ", got " << m.rows();
        throw GateError(os.str());
    }
    Gate g;
    g.kind = GateKind::Unitary;
    g.targets = std::move(targets);
    g.matrix = std::move(m);
    return g;
}

ComplexMatrix Gate::gate_matrix() const {
    switch (kind) {
        case GateKind::Hadamard:
            return hadamard_matrix();
        case GateKind::SqrtZ:
            return sqrt_z_matrix();
        case GateKind::Toffoli:
            return toffoli_matrix();
        case GateKind::Unitary:
            return matrix;
    }
    throw GateError("unknown gate kind");
}

ComplexMatrix compile_gates(const GateList& g, int total_qubits) {
    if (total_qubits < 0) {
        throw GateError("negative qubit count");
    }
    // The result has 4^n entries; cap accordingly.
    check_dimension_cap(std::ptrdiff_t(1) << std::min(62, 2 * total_qubits), "compiled gate list");
    const std::ptrdiff_t dim = std::ptrdiff_t(1) << total_qubits;

    RegisterLayout scratch;
    scratch.add("q", total_qubits);
    std::vector<int> all(total_qubits);
    std::iota(all.begin(), all.end(), 0);

    ComplexMatrix out(dim, dim);
    for (std::ptrdiff_t c = 0; c < dim; ++c) {
        PureState column = PureState::basis(scratch, c);
        apply_gate_list(column, g, all);
        out.col(c) = column.amplitudes;
    }
    return out;
}

void apply_gate_list(PureState& state, const GateList& g, const std::vector<int>& turn_qubits) {
    const int width = static_cast<int>(turn_qubits.size());
    for (const Gate& gate : g.gates) {
        check_gate_targets(gate, width);
        std::vector<int> global;
        global.reserve(gate.targets.size());
        for (int t : gate.targets) {
            global.push_back(turn_qubits[static_cast<size_t>(t)]);
        }
        apply_unitary_in_place(state, global, gate.gate_matrix());
    }
}

void apply_turn(PureState& state, const Turn& turn, const std::vector<int>& turn_qubits) {
    if (const GateList* g = std::get_if<GateList>(&turn)) {
        apply_gate_list(state, *g, turn_qubits);
    } else {
        apply_unitary_in_place(state, turn_qubits, std::get<ComplexMatrix>(turn));
    }
}

RegisterLayout ProtocolSpec::layout() const {
    RegisterLayout l;
    l.add("V", q_V);
    for (int i = 1; i <= k; ++i) {
        l.add(message_register(i), q_M);
    }
    for (int i = 1; i <= k; ++i) {
        l.add(prover_register(i), q_P);
    }
    return l;
}

std::string ProtocolSpec::message_register(int i) const {
    return "M" + std::to_string(i);
}

std::string ProtocolSpec::prover_register(int i) const {
    return "P" + std::to_string(i);
}

std::vector<int> ProtocolSpec::verifier_qubits() const {
    std::vector<int> q(static_cast<size_t>(q_V + k * q_M));
    std::iota(q.begin(), q.end(), 0);
    return q;
}

std::vector<int> ProtocolSpec::prover_qubits(int i) const {
    const RegisterLayout l = layout();
    std::vector<int> q = l.qubits_of(message_register(i));
    const std::vector<int> priv = l.qubits_of(prover_register(i));
    q.insert(q.end(), priv.begin(), priv.end());
    return q;
}

PriorEntanglement PriorEntanglement::maximally_entangled(int k, int q_ent) {
    if (k < 1 || q_ent < 0) {
        throw ContractError("maximally_entangled needs k >= 1 and q_ent >= 0");
    }
    if (q_ent == 0) {
        return none();
    }
    check_dimension_cap(std::ptrdiff_t(1) << std::min(62, k * q_ent), "prior entanglement");
    const std::ptrdiff_t local = std::ptrdiff_t(1) << q_ent;
    ComplexVector v = ComplexVector::Zero(std::ptrdiff_t(1) << (k * q_ent));
    const double amp = 1.0 / std::sqrt(static_cast<double>(local));
    for (std::ptrdiff_t i = 0; i < local; ++i) {
        std::ptrdiff_t idx = 0;
        for (int b = 0; b < k; ++b) {
            idx = (idx << q_ent) | i;
        }
        v(idx) = amp;
    }
    return of(std::move(v));
}

namespace {

void check_turn_structure(const Turn& turn, int width, std::ptrdiff_t want_dim,
                          const std::string& label, std::vector<std::string>& report) {
    if (const GateList* g = std::get_if<GateList>(&turn)) {
        for (size_t gi = 0; gi < g->gates.size(); ++gi) {
            const Gate& gate = g->gates[gi];
            try {
                check_gate_targets(gate, width);
            } catch (const GateError& e) {
                report.push_back(label + ", gate " + std::to_string(gi + 1) + ": " + e.what());
                continue;
            }
            if (gate.kind == GateKind::Unitary) {
                const std::ptrdiff_t gd = std::ptrdiff_t(1) << gate.targets.size();
                if (gate.matrix.rows() != gd || gate.matrix.cols() != gd) {
                    report.push_back(label + ", gate " + std::to_string(gi + 1) +
                                     ": matrix dimension does not match target count");
                } else if (!is_unitary(gate.matrix)) {
                    report.push_back(label + ", gate " + std::to_string(gi + 1) +
                                     ": matrix is not unitary");
                }
            }
        }
        return;
    }
    const ComplexMatrix& m = std::get<ComplexMatrix>(turn);
    if (m.rows() != want_dim || m.cols() != want_dim) {
        std::ostringstream os;
        os << label << ": expected dimension " << want_dim << ", got " << m.rows() << "x"
           << m.cols();
        report.push_back(os.str());
    } else if (!is_unitary(m)) {
        report.push_back(label + ": matrix is not unitary");
    }
}

}  // namespace

std::vector<std::string> validate_protocol(const ProtocolSpec& spec,
                                           const VerifierProgram& verifier,
                                           const ProverStrategy& provers,
                                           const PriorEntanglement& prior) {
    std::vector<std::string> report;
    if (spec.k < 1) {
        report.push_back("prover count k must be at least 1");
    }
    if (spec.m < 1) {
        report.push_back("message count m must be at least 1");
    }
    if (spec.q_V < 1) {
        report.push_back("verifier register needs at least one qubit (the output qubit)");
    }
    if (spec.q_M < 0 || spec.q_P < 0) {
        report.push_back("register sizes must be nonnegative");
    }
    if (spec.q_ent < 0 || spec.q_ent > spec.q_P) {
        report.push_back("q_ent must lie in [0, q_P]");
    }
    if (spec.output_qubit < 0 || spec.output_qubit >= spec.q_V) {
        report.push_back("output qubit must index into the verifier register");
    }
    if (!report.empty()) {
        return report;  // later checks assume a sane shape
    }
    if (spec.total_qubits() > max_qubits()) {
        std::ostringstream os;
        os << "protocol needs " << spec.total_qubits() << " qubits, cap is " << max_qubits();
        report.push_back(os.str());
        return report;
    }

    const std::ptrdiff_t v_dim = std::ptrdiff_t(1) << (spec.q_V + spec.k * spec.q_M);
    const int v_width = spec.q_V + spec.k * spec.q_M;
    const size_t want_v = static_cast<size_t>(spec.verifier_turn_count());
    if (verifier.turns.size() != want_v) {
        std::ostringstream os;
        os << "verifier has " << verifier.turns.size() << " turn(s), schedule needs " << want_v;
        report.push_back(os.str());
    }
    for (size_t t = 0; t < verifier.turns.size(); ++t) {
        check_turn_structure(verifier.turns[t], v_width, v_dim,
                             "verifier turn " + std::to_string(t + 1), report);
    }

    const std::ptrdiff_t p_dim = std::ptrdiff_t(1) << (spec.q_M + spec.q_P);
    const size_t want_p = static_cast<size_t>(spec.prover_turn_count());
    if (provers.turns.size() != static_cast<size_t>(spec.k)) {
        std::ostringstream os;
        os << "strategy covers " << provers.turns.size() << " prover(s), spec has " << spec.k;
        report.push_back(os.str());
    }
    for (size_t i = 0; i < provers.turns.size(); ++i) {
        const auto& list = provers.turns[i];
        if (list.size() != want_p) {
            std::ostringstream os;
            os << "prover " << (i + 1) << " has " << list.size() << " turn(s), schedule needs "
               << want_p;
            report.push_back(os.str());
        }
        for (size_t j = 0; j < list.size(); ++j) {
            std::ostringstream label;
            label << "prover " << (i + 1) << " turn " << (j + 1);
            if (list[j].rows() != p_dim || list[j].cols() != p_dim) {
                std::ostringstream os;
                os << label.str() << ": expected dimension " << p_dim << ", got " << list[j].rows()
                   << "x" << list[j].cols();
                report.push_back(os.str());
            } else if (!is_unitary(list[j])) {
                report.push_back(label.str() + ": matrix is not unitary");
            }
        }
    }

    if (!prior.absent()) {
        const std::ptrdiff_t want = std::ptrdiff_t(1) << (spec.k * spec.q_ent);
        if (prior.state.size() != want) {
            std::ostringstream os;
            os << "prior state has dimension " << prior.state.size() << ", expected " << want;
            report.push_back(os.str());
        } else if (std::abs(prior.state.norm() - 1.0) > kStructuralTol) {
            report.push_back("prior state is not normalized");
        }
    }
    return report;
}

PureState initial_state(const ProtocolSpec& spec, const PriorEntanglement& prior) {
    const RegisterLayout lay = spec.layout();
    if (prior.absent()) {
        return PureState::zero(lay);
    }
    const std::ptrdiff_t want = std::ptrdiff_t(1) << (spec.k * spec.q_ent);
    if (prior.state.size() != want) {
        std::ostringstream os;
        os << "prior state has dimension " << prior.state.size() << ", expected " << want;
        throw ShapeError(os.str());
    }
    std::vector<int> designated;
    for (int i = 1; i <= spec.k; ++i) {
        const int off = lay.offset_of(spec.prover_register(i));
        for (int q = 0; q < spec.q_ent; ++q) {
            designated.push_back(off + q);
        }
    }
    const std::vector<uint64_t> place = bit_placement(designated, lay.total_qubits());
    ComplexVector amps = ComplexVector::Zero(lay.dim());
    for (std::ptrdiff_t i = 0; i < prior.state.size(); ++i) {
        amps(static_cast<std::ptrdiff_t>(place[static_cast<size_t>(i)])) = prior.state(i);
    }
    return PureState(lay, std::move(amps));
}

RunResult run_protocol(const ProtocolSpec& spec, const VerifierProgram& verifier,
                       const ProverStrategy& provers, const PriorEntanglement& prior,
                       const RunOptions& options) {
    const int rounds = spec.prover_turn_count();
    if (verifier.turns.size() != static_cast<size_t>(spec.verifier_turn_count())) {
        throw ShapeError("verifier turn count does not match the schedule");
    }
    if (provers.turns.size() != static_cast<size_t>(spec.k)) {
        throw ShapeError("prover count does not match the spec");
    }
    for (const auto& list : provers.turns) {
        if (list.size() != static_cast<size_t>(rounds)) {
            throw ShapeError("prover turn count does not match the schedule");
        }
    }

    std::vector<int> order = options.prover_order;
    if (order.empty()) {
        order.resize(static_cast<size_t>(spec.k));
        std::iota(order.begin(), order.end(), 1);
    } else {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        bool ok = sorted.size() == static_cast<size_t>(spec.k);
        for (size_t i = 0; ok && i < sorted.size(); ++i) {
            ok = sorted[i] == static_cast<int>(i) + 1;
        }
        if (!ok) {
            throw ContractError("prover_order must be a permutation of 1..k");
        }
    }

    RunResult result{initial_state(spec, prior), 0.0, {}, {}};
    PureState& state = result.final_state;
    const std::vector<int> v_qubits = spec.verifier_qubits();

    size_t vi = 0;
    auto verifier_step = [&]() {
        apply_turn(state, verifier.turns[vi], v_qubits);
        ++vi;
        result.step_norms.push_back(state.amplitudes.norm());
        if (options.snapshot_after_verifier_turns) {
            result.verifier_snapshots.push_back(state);
        }
    };

    if (spec.m % 2 == 0) {
        verifier_step();
    }
    for (int j = 0; j < rounds; ++j) {
        for (int i : order) {
            apply_unitary_in_place(state, spec.prover_qubits(i),
                                   provers.turns[static_cast<size_t>(i - 1)][static_cast<size_t>(j)]);
        }
        result.step_norms.push_back(state.amplitudes.norm());
        verifier_step();
    }
    result.acceptance = measure_output_qubit(state, spec.output_qubit);
    return result;
}

}  // namespace qmip
