#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace phia {

enum class ErrorKind {
    NotCommutative,
    NotAssociative,
    NoUnit,
    AssociativityViolation,
    SingularElement,
    DimensionMismatch,
    NotFound,
    PhiNotInvertible,
    NoMatch,
    NotEquivalent,
    DegenerateParameters,
    NewtonDivergence,
    NoConvergence,
    ConditionViolated,
    DeltaZeroInconsistent,
    B1Zero,
    ParseError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::NotCommutative: return "NotCommutative";
        case ErrorKind::NotAssociative: return "NotAssociative";
        case ErrorKind::NoUnit: return "NoUnit";
        case ErrorKind::AssociativityViolation: return "AssociativityViolation";
        case ErrorKind::SingularElement: return "SingularElement";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::PhiNotInvertible: return "PhiNotInvertible";
        case ErrorKind::NoMatch: return "NoMatch";
        case ErrorKind::NotEquivalent: return "NotEquivalent";
        case ErrorKind::DegenerateParameters: return "DegenerateParameters";
        case ErrorKind::NewtonDivergence: return "NewtonDivergence";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::ConditionViolated: return "ConditionViolated";
        case ErrorKind::DeltaZeroInconsistent: return "DeltaZeroInconsistent";
        case ErrorKind::B1Zero: return "B1Zero";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

// Every library failure is raised as this type; `kind()` is the stable tag.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    Error(ErrorKind kind, const std::string& what, std::vector<double> history)
        : Error(kind, what) {
        history_ = std::move(history);
    }

    ErrorKind kind() const noexcept { return kind_; }
    // Successive-difference history for NoConvergence; empty otherwise.
    const std::vector<double>& history() const noexcept { return history_; }

private:
    ErrorKind kind_;
    std::vector<double> history_;
};

}  // namespace phia
