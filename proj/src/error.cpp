#include "tmas/error.hpp"

namespace tmas {

const char* error_code_name(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::MarginNotAboveOne: return "MarginNotAboveOne";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InputBoundViolated: return "InputBoundViolated";
    case ErrorCode::C1Violated: return "C1Violated";
    case ErrorCode::CellSizeTooLarge: return "CellSizeTooLarge";
    case ErrorCode::BoundsMismatch: return "BoundsMismatch";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::SharedService: return "SharedService";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::InfeasibleDiameter: return "InfeasibleDiameter";
    case ErrorCode::InfeasibleTimeStep: return "InfeasibleTimeStep";
    case ErrorCode::BallOutsideWorkspace: return "BallOutsideWorkspace";
    case ErrorCode::MismatchedTimeStep: return "MismatchedTimeStep";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::UndeclaredClock: return "UndeclaredClock";
    case ErrorCode::GuardFailed: return "GuardFailed";
    case ErrorCode::InvariantViolated: return "InvariantViolated";
    case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
    case ErrorCode::UnsupportedFragment: return "UnsupportedFragment";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ResourceBudgetExceeded: return "ResourceBudgetExceeded";
    case ErrorCode::MembershipViolation: return "MembershipViolation";
    case ErrorCode::ScenarioError: return "ScenarioError";
    case ErrorCode::PlanMismatch: return "PlanMismatch";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code)
{
}

void fail(ErrorCode code, const std::string& message)
{
    throw Error(code, message);
}

}  // namespace tmas
