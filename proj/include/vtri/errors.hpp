#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vtri {

enum class ErrorKind {
    DivisionByZero,
    NotFinite,
    ResourceLimit,
    DimensionMismatch,
    PreconditionViolation,
    IntersectionViolation,
    NotVSimplex,
    NotVComplex,
    NotInduced,
    TrichotomyViolation,
    BadDirection,
    SearchExhausted,
    OutsideDomain,
    NotInvertible,
    EmptySet,
    EmptyFamily,
    NonRationalFamily,
    StarConditionViolation,
    LiftingCheckFailed,
    VerificationFailed,
    ParseError,
    UnresolvedReference,
};

inline std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::NotFinite: return "NotFinite";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::IntersectionViolation: return "IntersectionViolation";
    case ErrorKind::NotVSimplex: return "NotVSimplex";
    case ErrorKind::NotVComplex: return "NotVComplex";
    case ErrorKind::NotInduced: return "NotInduced";
    case ErrorKind::TrichotomyViolation: return "TrichotomyViolation";
    case ErrorKind::BadDirection: return "BadDirection";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::EmptySet: return "EmptySet";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::NonRationalFamily: return "NonRationalFamily";
    case ErrorKind::StarConditionViolation: return "StarConditionViolation";
    case ErrorKind::LiftingCheckFailed: return "LiftingCheckFailed";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnresolvedReference: return "UnresolvedReference";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind and a human-readable
/// witness in its message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

} // namespace vtri
