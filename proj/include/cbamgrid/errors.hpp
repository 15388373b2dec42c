#pragma once

#include <stdexcept>
#include <string>

namespace cbamgrid {

// Error taxonomy shared across the library. Each failure carries a kind so
// callers (and tests) can dispatch on the category without parsing messages.
enum class ErrorKind {
    Parse,       // malformed input file content
    Schema,      // file structure/columns do not match the declared layout
    Integrity,   // data violates an invariant (gaps, duplicates)
    Config,      // invalid or missing configuration value
    Shape,       // tensor shape mismatch
    Mask,        // empty neighborhood / invalid attention mask
    Contract,    // precondition violated by the caller
    Range,       // index out of the valid range
    Training,    // divergence or failure during optimization
    Estimation,  // baseline regression failure (rank deficiency etc.)
    Io,          // filesystem failure
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Schema: return "schema";
        case ErrorKind::Integrity: return "integrity";
        case ErrorKind::Config: return "config";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Mask: return "mask";
        case ErrorKind::Contract: return "contract";
        case ErrorKind::Range: return "range";
        case ErrorKind::Training: return "training";
        case ErrorKind::Estimation: return "estimation";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) raise(kind, msg);
}

}  // namespace cbamgrid
