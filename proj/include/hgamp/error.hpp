#pragma once

#include <stdexcept>
#include <string>

namespace hgamp {

/// Error categories surfaced by the library. The CLI maps Parse/Validation
/// to exit code 1 and Infeasible to exit code 2.
enum class ErrorKind {
    Parse,       // malformed input file
    Validation,  // well-formed input violating a model invariant
    Structural,  // solution breaks the visit-each-customer-once invariant
    Infeasible,  // instance cannot be served (total capacity < total demand)
    Integrity,   // stored data disagrees with recomputation
    Invariant,   // internal invariant broken (indicates a bug)
    Unsupported, // operation not available for this input
};

struct Error : std::runtime_error {
    ErrorKind kind;
    Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

} // namespace hgamp
