#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctqw {

enum class ErrorKind {
    InvalidArgument,    // bad parameter value or out-of-range request
    DimensionMismatch,  // operands of incompatible shape
    Numerical,          // non-convergence, non-finite values, conservation drift
    MissingArtifact,    // an upstream file is absent
    Format,             // malformed file or config text
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::DimensionMismatch: return "dimension-mismatch";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::MissingArtifact: return "missing-artifact";
        case ErrorKind::Format: return "format";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace ctqw
