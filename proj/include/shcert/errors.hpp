#pragma once
// Error taxonomy shared by all shcert modules. Every failure mode surfaced
// by the library derives from shcert::error so the CLI can map it to a
// stage-tagged exit code.

#include <stdexcept>
#include <string>

namespace shcert {

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Interval/elementary-function preconditions (division by zero-straddling
// interval, sqrt of negative, ...).
struct domain_error : error {
    explicit domain_error(const std::string& msg) : error("domain error: " + msg) {}
};

// Mismatched orbit tables / dimensions.
struct shape_error : error {
    explicit shape_error(const std::string& msg) : error("shape error: " + msg) {}
};

// Input grid not invariant under the claimed group.
struct symmetry_error : error {
    explicit symmetry_error(const std::string& msg) : error("symmetry violation: " + msg) {}
};

// Operation requested for a group/symbol outside the supported set.
struct unsupported_error : error {
    explicit unsupported_error(const std::string& msg) : error("unsupported: " + msg) {}
};

// Newton failed to converge; carries the residual history in the message.
struct iteration_error : error {
    explicit iteration_error(const std::string& msg) : error("iteration failure: " + msg) {}
};

// Dense factorization/inversion failure.
struct decomposition_error : error {
    explicit decomposition_error(const std::string& msg) : error("decomposition failure: " + msg) {}
};

// Invalid or incomplete run configuration.
struct config_error : error {
    explicit config_error(const std::string& msg) : error("config error: " + msg) {}
};

// Unparseable candidate/certificate file.
struct format_error : error {
    explicit format_error(const std::string& msg) : error("format error: " + msg) {}
};

// An internal rigor check failed (signals a bug, not a data problem).
struct inconsistency_error : error {
    explicit inconsistency_error(const std::string& msg) : error("internal inconsistency: " + msg) {}
};

}  // namespace shcert
