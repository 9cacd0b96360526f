#pragma once

#include <stdexcept>
#include <string>

namespace aqclab {

// Input violates a documented precondition or invariant.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A requested size exceeds the configured resource envelope.
struct resource_error : std::length_error {
    using std::length_error::length_error;
};

// An iterative solver failed to reach its tolerance.
struct solver_error : std::runtime_error {
    solver_error(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual(best_residual) {}
    double best_residual;
};

// Time evolution left the unitary envelope (norm drift or non-finite values).
struct divergence_error : std::runtime_error {
    divergence_error(const std::string& what, long step)
        : std::runtime_error(what), step(step) {}
    long step;
};

// Random instance generation exhausted its restart budget.
struct generation_error : std::runtime_error {
    generation_error(const std::string& what, long attempts)
        : std::runtime_error(what), attempts(attempts) {}
    long attempts;
};

}  // namespace aqclab
