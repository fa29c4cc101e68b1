#pragma once

#include <stdexcept>
#include <string>

namespace tacsim {

// Base for all tacsim errors. `name()` is the stable identifier the CLI
// prints verbatim in front of the message.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& msg)
        : std::runtime_error(msg), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define TACSIM_ERROR_TYPE(NAME)                                              \
    class NAME : public Error {                                             \
    public:                                                                  \
        explicit NAME(const std::string& msg) : Error(#NAME, msg) {}         \
    };

// File / schema layer
TACSIM_ERROR_TYPE(ParseError)      // file is not valid JSON
TACSIM_ERROR_TYPE(SchemaError)     // missing/unknown field, wrong type
TACSIM_ERROR_TYPE(InvariantError)  // structurally valid but violates a model invariant

// Numeric / contract layer
TACSIM_ERROR_TYPE(DomainError)     // operation precondition violated
TACSIM_ERROR_TYPE(EmptyInput)

// Opponent adapter
TACSIM_ERROR_TYPE(OpponentFault)   // adapter timeout / protocol violation, rollout aborted
TACSIM_ERROR_TYPE(TimeoutError)
TACSIM_ERROR_TYPE(ProtocolError)

// Planner
TACSIM_ERROR_TYPE(Unreachable)
TACSIM_ERROR_TYPE(NoFeasibleRoute)
TACSIM_ERROR_TYPE(IrreparableViolation)
TACSIM_ERROR_TYPE(NoValidCandidate)

// Metrics / dataset
TACSIM_ERROR_TYPE(MissingPlannedTrajectory)
TACSIM_ERROR_TYPE(LengthMismatch)
TACSIM_ERROR_TYPE(NonPositiveProbability)
TACSIM_ERROR_TYPE(UnannotatedToken)
TACSIM_ERROR_TYPE(ShapeMismatch)

#undef TACSIM_ERROR_TYPE

}  // namespace tacsim
