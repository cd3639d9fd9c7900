#include "qmip/registers.hpp"

#include <algorithm>

namespace qmip {

void RegisterLayout::add(const std::string& name, int qubit_count) {
    if (qubit_count < 0)
        throw ContractError("RegisterLayout: register '" + name + "' has negative qubit count");
    if (has(name))
        throw AddressingError("RegisterLayout: duplicate register name '" + name + "'");
    regs_.emplace_back(name, qubit_count);
    total_ += qubit_count;
}

bool RegisterLayout::has(const std::string& name) const {
    for (const auto& [n, c] : regs_)
        if (n == name) return true;
    return false;
}

int RegisterLayout::count_of(const std::string& name) const {
    for (const auto& [n, c] : regs_)
        if (n == name) return c;
    throw AddressingError("RegisterLayout: unknown register '" + name + "'");
}

int RegisterLayout::offset_of(const std::string& name) const {
    int offset = 0;
    for (const auto& [n, c] : regs_) {
        if (n == name) return offset;
        offset += c;
    }
    throw AddressingError("RegisterLayout: unknown register '" + name + "'");
}

std::vector<int> RegisterLayout::qubits_of(const std::string& name) const {
    const int offset = offset_of(name);
    const int count = count_of(name);
    std::vector<int> out(count);
    for (int i = 0; i < count; ++i) out[i] = offset + i;
    return out;
}

std::vector<int> RegisterLayout::qubits_of(const std::vector<std::string>& names) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            if (names[i] == names[j])
                throw AddressingError("RegisterLayout: register '" + names[i] +
                                      "' listed twice");
    std::vector<int> out;
    // Walk registers in layout order so the result is globally ordered.
    for (const auto& [n, c] : regs_) {
        if (std::find(names.begin(), names.end(), n) != names.end()) {
            const int offset = offset_of(n);
            for (int i = 0; i < c; ++i) out.push_back(offset + i);
        }
    }
    // Every requested name must exist.
    for (const auto& name : names) (void)count_of(name);
    return out;
}

std::vector<std::string> RegisterLayout::complement(const std::vector<std::string>& names) const {
    for (const auto& name : names) (void)count_of(name);
    std::vector<std::string> out;
    for (const auto& [n, c] : regs_)
        if (std::find(names.begin(), names.end(), n) == names.end()) out.push_back(n);
    return out;
}

std::vector<std::uint64_t> bit_placement(const std::vector<int>& qubits, int total_qubits) {
    const std::size_t t = qubits.size();
    std::vector<std::uint64_t> place(std::size_t(1) << t, 0);
    for (std::uint64_t sub = 0; sub < place.size(); ++sub) {
        std::uint64_t idx = 0;
        for (std::size_t b = 0; b < t; ++b) {
            if (sub >> (t - 1 - b) & 1) idx |= std::uint64_t(1) << (total_qubits - 1 - qubits[b]);
        }
        place[sub] = idx;
    }
    return place;
}

std::vector<int> complement_qubits(const std::vector<int>& qubits, int total_qubits) {
    std::vector<int> out;
    for (int q = 0; q < total_qubits; ++q)
        if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) out.push_back(q);
    return out;
}

}  // namespace qmip
