#pragma once

#include <stdexcept>
#include <string>

namespace thetaval {

enum class ErrorCode {
    DivisorStraddlesZero,
    NegativeBaseEvenRoot,
    DomainError,
    UnsupportedArgument,
    NotConvergent,
    FactorNearZero,
    PreconditionViolated,
    DivisionByZeroEnclosure,
    NegativeEvenRootEnclosure,
    UnsupportedGammaArgument,
    EvaluationError,
    NoRootMatches,
    BothRootsMatch,
    RootsNotSeparable,
    ComplexRootsDetected,
    NoPermutationMatches,
    MultiplePermutationsMatch,
    ParseError,
    UnknownId,
};

inline const char *to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::DivisorStraddlesZero: return "DivisorStraddlesZero";
    case ErrorCode::NegativeBaseEvenRoot: return "NegativeBaseEvenRoot";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedArgument: return "UnsupportedArgument";
    case ErrorCode::NotConvergent: return "NotConvergent";
    case ErrorCode::FactorNearZero: return "FactorNearZero";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::DivisionByZeroEnclosure: return "DivisionByZeroEnclosure";
    case ErrorCode::NegativeEvenRootEnclosure: return "NegativeEvenRootEnclosure";
    case ErrorCode::UnsupportedGammaArgument: return "UnsupportedGammaArgument";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::NoRootMatches: return "NoRootMatches";
    case ErrorCode::BothRootsMatch: return "BothRootsMatch";
    case ErrorCode::RootsNotSeparable: return "RootsNotSeparable";
    case ErrorCode::ComplexRootsDetected: return "ComplexRootsDetected";
    case ErrorCode::NoPermutationMatches: return "NoPermutationMatches";
    case ErrorCode::MultiplePermutationsMatch: return "MultiplePermutationsMatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownId: return "UnknownId";
    }
    return "Unknown";
}

/// Every failure in the library surfaces as an Error carrying a machine-readable code.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code)
    {
    }
    ErrorCode code() const noexcept
    {
        return m_code;
    }

private:
    ErrorCode m_code;
};

} // namespace thetaval
