// errors.hpp — Exception types raised by the spinflop modules

#pragma once

#include <stdexcept>
#include <string>

namespace spinflop {

// Base of every numerical/domain failure. Precondition violations on plain
// arguments (negative times, empty grids) use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define SPINFLOP_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

SPINFLOP_DEFINE_ERROR(NonHermitianInput);
SPINFLOP_DEFINE_ERROR(ZeroDrive);
SPINFLOP_DEFINE_ERROR(StepTooLarge);
SPINFLOP_DEFINE_ERROR(DenominatorSingular);
SPINFLOP_DEFINE_ERROR(SeriesInvalid);
SPINFLOP_DEFINE_ERROR(QuadratureFailure);
SPINFLOP_DEFINE_ERROR(InvariantBreach);
SPINFLOP_DEFINE_ERROR(InsufficientDecay);

#undef SPINFLOP_DEFINE_ERROR

} // namespace spinflop
