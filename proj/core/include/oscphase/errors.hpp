#ifndef OSCPHASE_ERRORS_HPP
#define OSCPHASE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace oscphase {

// Adaptive integration could not proceed (step underflow or step budget
// exhausted). Carries the time at which integration stopped.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t_fail)
        : std::runtime_error(what + " (at t = " + std::to_string(t_fail) + ")"),
          t_fail_(t_fail) {}
    double t_fail() const { return t_fail_; }

private:
    double t_fail_;
};

// Newton/shooting solver failures (lock search, limit-cycle search).
class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Periodic-orbit Jacobian is singular: the orbit is not isolated.
class DegenerateOrbitError : public SolveError {
public:
    using SolveError::SolveError;
};

// Floquet stability assumptions violated (no unity multiplier, repeated
// unity multipliers, or a multiplier outside the unit circle).
class StabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace oscphase

#endif
