#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace frontlab {

enum class ErrorKind {
    InvalidInput,
    Config,
    DegenerateDerivative,
    UnresolvableDerivative,
    OutOfRange,
    InconsistentInputs,
    NoMonotoneFront,
    ConvergenceFailure,
    BracketFailure,
    InvalidWindow,
    WindowTooNarrow,
    BlowUp,
    FrontLost,
    NoCrossing,
    InsufficientData,
    TailResolution,
    InvalidEps,
    NoComparison,
    Construction,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

// Usage and configuration problems versus numerical breakdowns.
bool is_usage_error(ErrorKind kind);

} // namespace frontlab
