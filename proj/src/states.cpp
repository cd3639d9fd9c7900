#include "qmip/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qmip {

namespace {

std::uint64_t bit_mask(const std::vector<int>& qubits, int total) {
    std::uint64_t mask = 0;
    for (int q : qubits) {
        if (q < 0 || q >= total)
            throw AddressingError("qubit index " + std::to_string(q) + " out of range for " +
                                  std::to_string(total) + " qubits");
        mask |= std::uint64_t(1) << (total - 1 - q);
    }
    return mask;
}

// Reshape a raw amplitude vector over `total_bits` qubits into a matrix with
// rows indexed by the listed bit positions (most significant first) and
// columns by the remaining positions.
ComplexMatrix reshape_rows(const ComplexVector& v, const std::vector<int>& row_positions,
                           int total_bits) {
    const std::vector<int> col_positions = complement_qubits(row_positions, total_bits);
    const auto row_place = bit_placement(row_positions, total_bits);
    const auto col_place = bit_placement(col_positions, total_bits);
    ComplexMatrix m(std::ptrdiff_t(row_place.size()), std::ptrdiff_t(col_place.size()));
    for (std::size_t r = 0; r < row_place.size(); ++r)
        for (std::size_t c = 0; c < col_place.size(); ++c)
            m(r, c) = v(row_place[r] | col_place[c]);
    return m;
}

bool lexicographically_before(const ComplexVector& a, const ComplexVector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
        if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
    }
    return false;
}

}  // namespace

PureState::PureState(RegisterLayout lay, ComplexVector amps)
    : layout(std::move(lay)), amplitudes(std::move(amps)) {
    check_dimension_cap(layout.dim(), "PureState");
    if (amplitudes.size() != layout.dim())
        throw ShapeError("PureState: amplitude count " + std::to_string(amplitudes.size()) +
                         " does not match layout dimension " + std::to_string(layout.dim()));
    if (!amplitudes.allFinite())
        throw NumericError("PureState: non-finite amplitude");
    const double norm = amplitudes.norm();
    if (std::abs(norm - 1.0) > 1e-10)
        throw ContractError("PureState: norm " + std::to_string(norm) + " is not 1");
}

PureState PureState::zero(RegisterLayout lay) { return basis(std::move(lay), 0); }

PureState PureState::basis(RegisterLayout lay, std::uint64_t index) {
    check_dimension_cap(lay.dim(), "PureState");
    if (index >= std::uint64_t(lay.dim()))
        throw AddressingError("PureState::basis: index out of range");
    ComplexVector amps = ComplexVector::Zero(lay.dim());
    amps(index) = 1.0;
    return PureState(std::move(lay), std::move(amps));
}

DensityMatrix::DensityMatrix(RegisterLayout lay, ComplexMatrix m)
    : layout(std::move(lay)), matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols() || matrix.rows() != layout.dim())
        throw ShapeError("DensityMatrix: matrix shape does not match layout dimension");
    if (!matrix.allFinite())
        throw NumericError("DensityMatrix: non-finite entry");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw ContractError("DensityMatrix: not Hermitian within 1e-10");
    if (std::abs(matrix.trace().real() - 1.0) > 1e-10 || std::abs(matrix.trace().imag()) > 1e-10)
        throw ContractError("DensityMatrix: trace is not 1 within 1e-10");
}

void apply_unitary_in_place(PureState& state, const std::vector<int>& targets,
                            const ComplexMatrix& u) {
    const int total = state.layout.total_qubits();
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = i + 1; j < targets.size(); ++j)
            if (targets[i] == targets[j])
                throw AddressingError("apply_unitary: duplicate target qubit " +
                                      std::to_string(targets[i]));
    const std::uint64_t mask = bit_mask(targets, total);
    const std::ptrdiff_t local_dim = std::ptrdiff_t(1) << targets.size();
    if (u.rows() != local_dim || u.cols() != local_dim)
        throw ShapeError("apply_unitary: matrix dimension " + std::to_string(u.rows()) +
                         " does not match " + std::to_string(targets.size()) + " target qubits");
    const auto place = bit_placement(targets, total);
    ComplexVector scratch(local_dim);
    const std::uint64_t dim = std::uint64_t(state.amplitudes.size());
    for (std::uint64_t base = 0; base < dim; ++base) {
        if (base & mask) continue;  // enumerate each non-target pattern once
        for (std::ptrdiff_t t = 0; t < local_dim; ++t)
            scratch(t) = state.amplitudes(base | place[t]);
        for (std::ptrdiff_t t = 0; t < local_dim; ++t) {
            Complex acc = 0.0;
            for (std::ptrdiff_t s = 0; s < local_dim; ++s) acc += u(t, s) * scratch(s);
            state.amplitudes(base | place[t]) = acc;
        }
    }
}

PureState apply_unitary(PureState state, const std::vector<int>& targets,
                        const ComplexMatrix& u) {
    apply_unitary_in_place(state, targets, u);
    return state;
}

ComplexMatrix amplitude_matrix(const PureState& state, const std::vector<int>& row_qubits) {
    return reshape_rows(state.amplitudes, row_qubits, state.layout.total_qubits());
}

namespace {

RegisterLayout surviving_layout(const RegisterLayout& layout,
                                const std::vector<std::string>& keep) {
    for (const auto& name : keep) (void)layout.count_of(name);
    RegisterLayout out;
    for (const auto& [n, c] : layout.registers())
        if (std::find(keep.begin(), keep.end(), n) != keep.end()) out.add(n, c);
    return out;
}

}  // namespace

DensityMatrix partial_trace(const PureState& state, const std::vector<std::string>& keep) {
    const auto kept_qubits = state.layout.qubits_of(keep);
    ComplexMatrix m = amplitude_matrix(state, kept_qubits);
    ComplexMatrix rho = m * m.adjoint();
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    return DensityMatrix(surviving_layout(state.layout, keep), std::move(rho));
}

DensityMatrix partial_trace(const DensityMatrix& input, const std::vector<std::string>& keep) {
    const int total = input.layout.total_qubits();
    const auto kept_qubits = input.layout.qubits_of(keep);
    const auto traced_qubits = complement_qubits(kept_qubits, total);
    const auto kept_place = bit_placement(kept_qubits, total);
    const auto traced_place = bit_placement(traced_qubits, total);
    const std::ptrdiff_t dk = std::ptrdiff_t(kept_place.size());
    ComplexMatrix rho = ComplexMatrix::Zero(dk, dk);
    for (std::ptrdiff_t r = 0; r < dk; ++r)
        for (std::ptrdiff_t c = 0; c < dk; ++c) {
            Complex acc = 0.0;
            for (std::uint64_t t : traced_place)
                acc += input.matrix(kept_place[r] | t, kept_place[c] | t);
            rho(r, c) = acc;
        }
    rho = ((rho + rho.adjoint()) / 2.0).eval();
    return DensityMatrix(surviving_layout(input.layout, keep), std::move(rho));
}

SchmidtDecomposition schmidt_decompose(const PureState& state,
                                       const std::vector<std::string>& left,
                                       double rank_tol) {
    if (left.empty())
        throw CutError("schmidt_decompose: empty cut");
    const auto left_qubits = state.layout.qubits_of(left);
    if (left_qubits.empty() || (int)left_qubits.size() == state.layout.total_qubits())
        throw CutError("schmidt_decompose: cut must leave qubits on both sides");

    ComplexMatrix m = amplitude_matrix(state, left_qubits);
    SingularValueDecomposition dec = svd(m);

    // Keep everything above numerical noise so the coefficients stay a unit
    // vector; `rank` applies the caller's threshold.
    const double top = dec.singulars.size() ? dec.singulars(0) : 0.0;
    int kept = 0;
    for (Eigen::Index i = 0; i < dec.singulars.size(); ++i)
        if (dec.singulars(i) > 1e-14 * top) ++kept;
    if (kept == 0) kept = 1;

    SchmidtDecomposition out;
    out.left_qubits = left_qubits;
    out.right_qubits = complement_qubits(left_qubits, state.layout.total_qubits());
    out.coefficients.resize(kept);
    out.left_vectors.resize(m.rows(), kept);
    out.right_vectors.resize(m.cols(), kept);
    for (int i = 0; i < kept; ++i) {
        out.coefficients(i) = dec.singulars(i);
        // The state is sum_i beta_i L_i (x) R_i with R_i the conjugated right
        // singular vector; phases move between the sides freely, so pin the
        // left vector to the phase convention and counter-rotate the right.
        ComplexVector l = dec.left.col(i);
        ComplexVector r = dec.right.col(i).conjugate();
        ComplexVector ln = phase_normalized(l);
        if (l.size() > 0) {
            Complex ratio = 1.0;
            for (Eigen::Index e = 0; e < l.size(); ++e)
                if (std::abs(l(e)) > 1e-9) {
                    ratio = ln(e) / l(e);
                    break;
                }
            r *= std::conj(ratio);
        }
        out.left_vectors.col(i) = ln;
        out.right_vectors.col(i) = r;
    }

    // Deterministic order for ties: coefficient descending, then first
    // differing amplitude of the (phase-normalized) left vectors.
    std::vector<int> order(kept);
    std::iota(order.begin(), order.end(), 0);
    const double tie = 1e-12 * (top > 0 ? top : 1.0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (std::abs(out.coefficients(a) - out.coefficients(b)) > tie)
            return out.coefficients(a) > out.coefficients(b);
        return lexicographically_before(out.left_vectors.col(a), out.left_vectors.col(b));
    });
    SchmidtDecomposition sorted = out;
    for (int i = 0; i < kept; ++i) {
        sorted.coefficients(i) = out.coefficients(order[i]);
        sorted.left_vectors.col(i) = out.left_vectors.col(order[i]);
        sorted.right_vectors.col(i) = out.right_vectors.col(order[i]);
    }
    sorted.rank = 0;
    for (int i = 0; i < kept; ++i)
        if (sorted.coefficients(i) > rank_tol * sorted.coefficients(0)) ++sorted.rank;
    return sorted;
}

int ent2(const PureState& state, const std::vector<std::string>& left, double rank_tol) {
    return schmidt_decompose(state, left, rank_tol).rank;
}

int ent3_upper_bound(const PureState& state,
                     const std::vector<std::vector<std::string>>& parts, double rank_tol) {
    if (parts.size() != 3)
        throw CutError("ent3_upper_bound: exactly three parts required");
    std::vector<std::string> all;
    for (const auto& p : parts) {
        if (p.empty()) throw CutError("ent3_upper_bound: empty part");
        all.insert(all.end(), p.begin(), p.end());
    }
    // Partition check: disjoint and covering.
    std::vector<std::string> names;
    for (const auto& [n, c] : state.layout.registers()) names.push_back(n);
    std::vector<std::string> sorted_all = all;
    std::sort(sorted_all.begin(), sorted_all.end());
    if (std::adjacent_find(sorted_all.begin(), sorted_all.end()) != sorted_all.end())
        throw CutError("ent3_upper_bound: parts overlap");
    std::vector<std::string> sorted_names = names;
    std::sort(sorted_names.begin(), sorted_names.end());
    if (sorted_all != sorted_names)
        throw CutError("ent3_upper_bound: parts do not cover the layout");

    SchmidtDecomposition first = schmidt_decompose(state, parts[0], rank_tol);

    // Positions of part-2 qubits inside the right-side index space.
    const auto part2_qubits = state.layout.qubits_of(parts[1]);
    std::vector<int> positions;
    for (std::size_t pos = 0; pos < first.right_qubits.size(); ++pos)
        if (std::find(part2_qubits.begin(), part2_qubits.end(), first.right_qubits[pos]) !=
            part2_qubits.end())
            positions.push_back(int(pos));

    int count = 0;
    for (int i = 0; i < first.rank; ++i) {
        ComplexMatrix m = reshape_rows(first.right_vectors.col(i), positions,
                                       int(first.right_qubits.size()));
        SingularValueDecomposition dec = svd(m);
        const double top = dec.singulars(0);
        for (Eigen::Index j = 0; j < dec.singulars.size(); ++j)
            if (dec.singulars(j) > rank_tol * top) ++count;
    }
    return count;
}

PureState purify(const DensityMatrix& rho, const std::string& ancilla_name) {
    EigenDecomposition dec = hermitian_eig(rho.matrix, 1e-10);
    for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
        if (dec.eigenvalues(i) < -1e-10)
            throw ContractError("purify: density matrix has eigenvalue " +
                                std::to_string(dec.eigenvalues(i)));
    }
    RegisterLayout layout = rho.layout;
    layout.add(ancilla_name, rho.layout.total_qubits());
    check_dimension_cap(layout.dim(), "purify");
    const std::ptrdiff_t d = rho.matrix.rows();
    ComplexVector amps = ComplexVector::Zero(layout.dim());
    for (std::ptrdiff_t i = 0; i < d; ++i) {
        const double lambda = std::max(dec.eigenvalues(i), 0.0);
        if (lambda == 0.0) continue;
        ComplexVector v = phase_normalized(dec.eigenvectors.col(i));
        const double w = std::sqrt(lambda);
        for (std::ptrdiff_t r = 0; r < d; ++r) amps(r * d + i) += w * v(r);
    }
    amps /= amps.norm();
    return PureState(std::move(layout), std::move(amps));
}

ComplexMatrix uhlmann_unitary(const PureState& phi, const PureState& psi,
                              const std::vector<std::string>& part2, double tol) {
    if (!(phi.layout == psi.layout))
        throw ShapeError("uhlmann_unitary: states have different layouts");
    const int total = phi.layout.total_qubits();
    const auto p2 = phi.layout.qubits_of(part2);
    if (p2.empty())
        throw CutError("uhlmann_unitary: part2 is empty");

    const auto rest = complement_qubits(p2, total);
    // Matrices with rows over the untouched factor and columns over part2;
    // (I (x) U) acts as F -> F U^T in this convention.
    ComplexMatrix f = reshape_rows(phi.amplitudes, rest, total);
    ComplexMatrix g = reshape_rows(psi.amplitudes, rest, total);
    const std::ptrdiff_t d2 = f.cols();

    // Reduced states on the untouched factor are F F^dag and G G^dag; their
    // difference H S H^dag (H = [F G], S = diag(I, -I)) has rank <= 2 d2.
    // With H = U Sigma W^dag its spectrum equals that of the small Hermitian
    // matrix Sigma (W^dag S W) Sigma, which avoids both the full dR x dR
    // difference and the precision loss of forming H^dag H.
    {
        ComplexMatrix h(f.rows(), 2 * d2);
        h.leftCols(d2) = f;
        h.rightCols(d2) = g;
        const SingularValueDecomposition dh = svd(h);
        ComplexMatrix sw = dh.right;  // S W: rows of W flip sign on the G half
        sw.bottomRows(d2) *= -1.0;
        const ComplexMatrix b = dh.singulars.asDiagonal() * (dh.right.adjoint() * sw) *
                                dh.singulars.asDiagonal();
        const double gap = hermitian_eig(b).eigenvalues.cwiseAbs().maxCoeff();
        if (gap > tol) {
            std::ostringstream os;
            os << "uhlmann_unitary: reduced states on the complement differ by " << gap
               << " (tolerance " << tol << ")";
            throw ContractError(os.str());
        }
    }

    SingularValueDecomposition df = svd(f);
    SingularValueDecomposition dg = svd(g);
    const Eigen::Index nsv = std::min(df.singulars.size(), dg.singulars.size());
    RealVector s = (df.singulars.head(nsv) + dg.singulars.head(nsv)) / 2.0;
    const double top = s.size() ? s(0) : 0.0;

    Eigen::Index r = 0;
    while (r < nsv && s(r) > 1e-9 * top) ++r;

    // Degenerate spectral blocks must be aligned jointly: split [0, r) at
    // descents larger than a generous relative gap (merging across a true
    // gap is harmless because exact eigenspaces of the same reduced state
    // are orthogonal, so the overlap stays block-diagonal anyway).
    ComplexMatrix rot = ComplexMatrix::Zero(r, r);
    const double gap_threshold = 1e-4 * (top > 0 ? top : 1.0);
    Eigen::Index start = 0;
    while (start < r) {
        Eigen::Index end = start + 1;
        while (end < r && s(end - 1) - s(end) <= gap_threshold) ++end;
        ComplexMatrix overlap =
            df.left.middleCols(start, end - start).adjoint() * dg.left.middleCols(start, end - start);
        rot.block(start, start, end - start, end - start) = polar_unitary(overlap);
        start = end;
    }

    ComplexMatrix vf = df.right.leftCols(r);
    ComplexMatrix vg = dg.right.leftCols(r);
    ComplexMatrix ut = vf * rot * vg.adjoint();
    if (r < d2) {
        ComplexMatrix vfp = orthonormal_completion(vf);
        ComplexMatrix vgp = orthonormal_completion(vg);
        ut += vfp * vgp.adjoint();
    }
    ComplexMatrix u = polar_unitary(ut.transpose());

    // The construction is exact in exact arithmetic; a large residual here
    // means the inputs only approximately admitted the map.
    PureState mapped = apply_unitary(phi, p2, u);
    const double residual = (mapped.amplitudes - psi.amplitudes).norm();
    if (residual > 1e-8) {
        std::ostringstream os;
        os << "uhlmann_unitary: synthesis residual " << residual;
        throw NumericError(os.str());
    }
    return u;
}

PureState compress_subsystem(const PureState& psi, const std::string& subsystem,
                             int budget_qubits, double rank_tol) {
    const int count = psi.layout.count_of(subsystem);
    const int budget = std::min(budget_qubits, count);
    if (budget < 0)
        throw ContractError("compress_subsystem: negative budget");
    const auto left_names = psi.layout.complement({subsystem});
    if (left_names.empty())
        throw CutError("compress_subsystem: subsystem covers the whole layout");

    SchmidtDecomposition dec = schmidt_decompose(psi, left_names, rank_tol);
    if ((std::ptrdiff_t(1) << budget) < dec.rank)
        throw CapacityError("compress_subsystem: Schmidt rank " + std::to_string(dec.rank) +
                            " exceeds budget of " + std::to_string(budget) + " qubits");

    const int total = psi.layout.total_qubits();
    const auto left_place = bit_placement(dec.left_qubits, total);
    const auto sub_place = bit_placement(psi.layout.qubits_of(subsystem), total);
    ComplexVector amps = ComplexVector::Zero(psi.amplitudes.size());
    for (int i = 0; i < dec.rank; ++i) {
        // Basis state i of the subsystem, packed into the leading qubits so
        // everything beyond the first `budget` qubits stays |0>.
        const std::uint64_t sub_index = std::uint64_t(i) << (count - budget);
        const std::uint64_t sub_bits = sub_place[sub_index];
        for (std::ptrdiff_t a = 0; a < dec.left_vectors.rows(); ++a) {
            const Complex amp = dec.coefficients(i) * dec.left_vectors(a, i);
            if (amp != Complex(0.0, 0.0)) amps(left_place[a] | sub_bits) = amp;
        }
    }
    amps /= amps.norm();
    return PureState(psi.layout, std::move(amps));
}

double measure_output_qubit(const PureState& state, int qubit) {
    const int total = state.layout.total_qubits();
    if (qubit < 0 || qubit >= total)
        throw AddressingError("measure_output_qubit: qubit " + std::to_string(qubit) +
                              " out of range");
    const std::uint64_t bit = std::uint64_t(1) << (total - 1 - qubit);
    double p = 0.0;
    for (std::uint64_t i = 0; i < std::uint64_t(state.amplitudes.size()); ++i)
        if (i & bit) p += std::norm(state.amplitudes(i));
    return std::min(p, 1.0);
}

PureState restrict_register(const PureState& state, const std::string& name, int new_count,
                            double tol) {
    const int count = state.layout.count_of(name);
    if (new_count < 0 || new_count > count)
        throw ShapeError("restrict_register: new count " + std::to_string(new_count) +
                         " not in [0, " + std::to_string(count) + "]");
    if (new_count == count) return state;
    const double leak = support_leak(state, name, new_count);
    if (leak > tol)
        throw ContractError("restrict_register: support of norm " + std::to_string(leak) +
                            " on dropped qubits of '" + name + "'");

    const int total = state.layout.total_qubits();
    const auto reg_qubits = state.layout.qubits_of(name);
    const std::vector<int> dropped(reg_qubits.begin() + new_count, reg_qubits.end());
    const std::uint64_t dropped_mask = bit_mask(dropped, total);

    RegisterLayout layout;
    for (const auto& [n, c] : state.layout.registers()) layout.add(n, n == name ? new_count : c);

    ComplexVector amps = ComplexVector::Zero(layout.dim());
    std::uint64_t out = 0;
    for (std::uint64_t idx = 0; idx < std::uint64_t(state.amplitudes.size()); ++idx) {
        if (idx & dropped_mask) continue;
        amps(out++) = state.amplitudes(idx);
    }
    amps /= amps.norm();
    return PureState(std::move(layout), std::move(amps));
}

PureState embed_register(const PureState& state, const std::string& name, int new_count) {
    const int count = state.layout.count_of(name);
    if (new_count < count)
        throw ShapeError("embed_register: new count " + std::to_string(new_count) +
                         " smaller than current " + std::to_string(count));
    if (new_count == count) return state;

    RegisterLayout layout;
    for (const auto& [n, c] : state.layout.registers()) layout.add(n, n == name ? new_count : c);
    check_dimension_cap(layout.dim(), "embed_register");

    const int total = layout.total_qubits();
    const auto reg_qubits = layout.qubits_of(name);
    const std::vector<int> added(reg_qubits.begin() + count, reg_qubits.end());
    const std::uint64_t added_mask = bit_mask(added, total);

    ComplexVector amps = ComplexVector::Zero(layout.dim());
    std::uint64_t in = 0;
    for (std::uint64_t idx = 0; idx < std::uint64_t(layout.dim()); ++idx) {
        if (idx & added_mask) continue;
        amps(idx) = state.amplitudes(in++);
    }
    return PureState(std::move(layout), std::move(amps));
}

double support_leak(const PureState& state, const std::string& name, int prefix) {
    const int count = state.layout.count_of(name);
    if (prefix < 0 || prefix > count)
        throw ShapeError("support_leak: prefix out of range");
    if (prefix == count) return 0.0;
    const auto reg_qubits = state.layout.qubits_of(name);
    const std::vector<int> tail(reg_qubits.begin() + prefix, reg_qubits.end());
    const std::uint64_t mask = bit_mask(tail, state.layout.total_qubits());
    double mass = 0.0;
    for (std::uint64_t i = 0; i < std::uint64_t(state.amplitudes.size()); ++i)
        if (i & mask) mass += std::norm(state.amplitudes(i));
    return std::sqrt(mass);
}

}  // namespace qmip
