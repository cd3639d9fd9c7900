#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmip/errors.hpp"

namespace qmip {

// Named qubit registers with a fixed global ordering. Qubit 0 of the layout
// is the leftmost tensor factor and therefore the most significant bit of an
// amplitude index; a register's own qubits are likewise ordered
// most-significant first.
class RegisterLayout {
public:
    RegisterLayout() = default;

    // Appends a register. Throws AddressingError on duplicate names,
    // ContractError on negative counts.
    void add(const std::string& name, int qubit_count);

    int total_qubits() const { return total_; }
    std::ptrdiff_t dim() const { return std::ptrdiff_t(1) << total_; }

    bool has(const std::string& name) const;
    int count_of(const std::string& name) const;

    // Global index of the register's first (most significant) qubit.
    int offset_of(const std::string& name) const;

    // Global qubit indices of one register, most significant first.
    std::vector<int> qubits_of(const std::string& name) const;

    // Global qubit indices of a set of registers, in global order
    // (independent of the order the names are passed in). Duplicate names
    // are an addressing error.
    std::vector<int> qubits_of(const std::vector<std::string>& names) const;

    // All register names not in `names`, in layout order.
    std::vector<std::string> complement(const std::vector<std::string>& names) const;

    const std::vector<std::pair<std::string, int>>& registers() const { return regs_; }

    bool operator==(const RegisterLayout& other) const { return regs_ == other.regs_; }

private:
    std::vector<std::pair<std::string, int>> regs_;
    int total_ = 0;
};

// Bit placement tables for subsystem indexing. `qubits` lists global qubit
// indices, most significant first; the table maps a subsystem basis index to
// the corresponding bits of a global amplitude index.
std::vector<std::uint64_t> bit_placement(const std::vector<int>& qubits, int total_qubits);

// All global qubit indices not in `qubits`, ascending.
std::vector<int> complement_qubits(const std::vector<int>& qubits, int total_qubits);

}  // namespace qmip
