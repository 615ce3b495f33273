#pragma once

#include <stdexcept>
#include <string>

namespace msopt {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad inputs or configuration. The CLI maps these to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

// Numerical failure during a run. The CLI maps these to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

#define MSOPT_DEFINE_ERROR(Name, Base)   \
    class Name : public Base {           \
    public:                              \
        using Base::Base;                \
    };

MSOPT_DEFINE_ERROR(OverlapError, InputError)
MSOPT_DEFINE_ERROR(NonPositiveError, InputError)
MSOPT_DEFINE_ERROR(OrderError, InputError)
MSOPT_DEFINE_ERROR(EmptyBandError, InputError)
MSOPT_DEFINE_ERROR(DimMismatchError, InputError)
MSOPT_DEFINE_ERROR(InvalidToleranceError, InputError)
MSOPT_DEFINE_ERROR(DegenerateIntervalError, InputError)
MSOPT_DEFINE_ERROR(HypothesisError, InputError)
MSOPT_DEFINE_ERROR(DegenerateError, InputError)
MSOPT_DEFINE_ERROR(ConfigError, InputError)

MSOPT_DEFINE_ERROR(NonFiniteError, NumericalError)
MSOPT_DEFINE_ERROR(BudgetExceeded, NumericalError)
MSOPT_DEFINE_ERROR(BreakdownError, NumericalError)
MSOPT_DEFINE_ERROR(ConvergenceError, NumericalError)
MSOPT_DEFINE_ERROR(IllConditionedError, NumericalError)
MSOPT_DEFINE_ERROR(NotFound, NumericalError)

#undef MSOPT_DEFINE_ERROR

}  // namespace msopt
