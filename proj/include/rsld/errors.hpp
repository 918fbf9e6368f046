#pragma once

#include <stdexcept>
#include <string>

namespace rsld {

/// Base class for all domain errors raised by the engine.
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two p-goals being merged share a priority value.
struct PriorityClash : EngineError {
    using EngineError::EngineError;
};

/// Concatenation attempted where the left goal is not entirely below the right one.
struct OrderViolation : EngineError {
    using EngineError::EngineError;
};

/// An atom was requested from an empty goal.
struct EmptyGoal : EngineError {
    using EngineError::EngineError;
};

/// A shifting was applied to a priority outside its finite support.
struct ShiftingSupportError : EngineError {
    using EngineError::EngineError;
};

/// A lineage tag does not occur in the designated resolvent.
struct UnknownTag : EngineError {
    using EngineError::EngineError;
};

/// A step index is outside the derivation record.
struct IndexOutOfRange : EngineError {
    using EngineError::EngineError;
};

/// A lowering instance violates its construction invariants.
struct InvalidInstance : EngineError {
    using EngineError::EngineError;
};

struct ParseError : EngineError {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_)
        : EngineError(msg + " at line " + std::to_string(line_) + ", column " +
                      std::to_string(column_)),
          line(line_), column(column_) {}
};

} // namespace rsld
