#pragma once

#include <stdexcept>
#include <string>

namespace qmip {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Dimension / shape mismatch between operands (e.g. multiplying a 2x3 by a 2x2).
struct ShapeError : Error {
    using Error::Error;
};

// A computation would exceed the global qubit / dimension cap.
struct CapacityError : Error {
    using Error::Error;
};

// Unknown register name or qubit index out of range.
struct AddressingError : Error {
    using Error::Error;
};

// A mathematical precondition does not hold: non-Hermitian input where a
// Hermitian operator is required, non-unit-norm state, mismatched reduced
// states, support outside a declared prefix, and so on.
struct ContractError : Error {
    using Error::Error;
};

// Numerical breakdown (non-convergence, NaN/Inf in inputs).
struct NumericError : Error {
    using Error::Error;
};

// Ill-formed subsystem cut (empty, full, or not a partition).
struct CutError : Error {
    using Error::Error;
};

// Malformed input file or protocol description (CLI layer).
struct InputError : Error {
    using Error::Error;
};

}  // namespace qmip
