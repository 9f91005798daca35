#pragma once

#include <stdexcept>
#include <string>

namespace tmas {

enum class ErrorCode {
    InvalidArgument,
    DisconnectedGraph,
    SelfLoop,
    DuplicateEdge,
    MarginNotAboveOne,
    DimensionMismatch,
    IndexOutOfRange,
    InputBoundViolated,
    C1Violated,
    CellSizeTooLarge,
    BoundsMismatch,
    OutOfBounds,
    SharedService,
    LambdaOutOfRange,
    InfeasibleDiameter,
    InfeasibleTimeStep,
    BallOutsideWorkspace,
    MismatchedTimeStep,
    LengthMismatch,
    UnknownState,
    SyntaxError,
    EmptyInterval,
    UndeclaredClock,
    GuardFailed,
    InvariantViolated,
    AlphabetMismatch,
    UnsupportedFragment,
    Infeasible,
    ResourceBudgetExceeded,
    MembershipViolation,
    ScenarioError,
    PlanMismatch,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace tmas
