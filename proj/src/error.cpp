#include "frontlab/error.hpp"

namespace frontlab {

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Config: return "config";
    case ErrorKind::DegenerateDerivative: return "degenerate-derivative";
    case ErrorKind::UnresolvableDerivative: return "unresolvable-derivative";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::InconsistentInputs: return "inconsistent-inputs";
    case ErrorKind::NoMonotoneFront: return "no-monotone-front";
    case ErrorKind::ConvergenceFailure: return "convergence-failure";
    case ErrorKind::BracketFailure: return "bracket-failure";
    case ErrorKind::InvalidWindow: return "invalid-window";
    case ErrorKind::WindowTooNarrow: return "window-too-narrow";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::FrontLost: return "front-lost";
    case ErrorKind::NoCrossing: return "no-crossing";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::TailResolution: return "tail-resolution";
    case ErrorKind::InvalidEps: return "invalid-eps";
    case ErrorKind::NoComparison: return "no-comparison";
    case ErrorKind::Construction: return "construction";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind)
{
}

void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

bool is_usage_error(ErrorKind kind)
{
    return kind == ErrorKind::InvalidInput || kind == ErrorKind::Config;
}

} // namespace frontlab
