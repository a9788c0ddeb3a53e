#pragma once

#include <stdexcept>
#include <string>

namespace segdyn {

// Two families: InputError means the caller asked for something outside the
// model's domain, NumericalError means a solver or integrator gave up.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

#define SEGDYN_DEFINE_ERROR(Name, Base)                      \
  class Name : public Base {                                 \
   public:                                                   \
    explicit Name(const std::string& what) : Base(what) {}  \
  };

SEGDYN_DEFINE_ERROR(SlopeOutOfRange, InputError)
SEGDYN_DEFINE_ERROR(NonPositiveDimension, InputError)
SEGDYN_DEFINE_ERROR(OnSegment, InputError)
SEGDYN_DEFINE_ERROR(DomainViolation, InputError)
SEGDYN_DEFINE_ERROR(AxisSingularity, InputError)
SEGDYN_DEFINE_ERROR(ZeroAngularMomentum, InputError)
SEGDYN_DEFINE_ERROR(OutsideEnergyShell, InputError)
SEGDYN_DEFINE_ERROR(AxisCrossing, InputError)

SEGDYN_DEFINE_ERROR(StepSizeUnderflow, NumericalError)
SEGDYN_DEFINE_ERROR(MaxStepsExceeded, NumericalError)
SEGDYN_DEFINE_ERROR(NewtonDiverged, NumericalError)
SEGDYN_DEFINE_ERROR(NoReturn, NumericalError)
SEGDYN_DEFINE_ERROR(QuadratureNotConverged, NumericalError)

#undef SEGDYN_DEFINE_ERROR

}  // namespace segdyn
