#pragma once

#include <stdexcept>
#include <string>

namespace siegert {

// Bad input: malformed model, out-of-domain argument, violated precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The input was valid but the numerics failed (overflow, non-convergence,
// branch singularity, uncertified root).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class BranchSingularity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace siegert
