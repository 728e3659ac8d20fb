#ifndef TROPICA_ERRORS_HPP
#define TROPICA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tropica {

// Rejected input or violated precondition.  The CLI maps these to exit code 1.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A checked internal invariant failed.  The CLI maps these to exit code 2 and
// the message names the invariant.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

#define TROPICA_INPUT_ERROR(NAME)                          \
  struct NAME : InputError {                               \
    explicit NAME(const std::string& msg)                  \
        : InputError(std::string(#NAME) + ": " + msg) {}   \
  }

TROPICA_INPUT_ERROR(NotIdempotent);
TROPICA_INPUT_ERROR(DomainMismatch);
TROPICA_INPUT_ERROR(DimensionMismatch);
TROPICA_INPUT_ERROR(Unsupported);
TROPICA_INPUT_ERROR(NotTotallyOrdered);
TROPICA_INPUT_ERROR(NotHomomorphism);
TROPICA_INPUT_ERROR(EmptyFamily);
TROPICA_INPUT_ERROR(NotABase);
TROPICA_INPUT_ERROR(NotAFilter);
TROPICA_INPUT_ERROR(NotAnIdeal);
TROPICA_INPUT_ERROR(NotAProperFilter);
TROPICA_INPUT_ERROR(TooLarge);
TROPICA_INPUT_ERROR(ShapeError);
TROPICA_INPUT_ERROR(NegativeDistance);
TROPICA_INPUT_ERROR(UnknownPoint);
TROPICA_INPUT_ERROR(NotUltrametric);
TROPICA_INPUT_ERROR(CoverageError);
TROPICA_INPUT_ERROR(MonotonicityError);
TROPICA_INPUT_ERROR(DegenerateDistance);
TROPICA_INPUT_ERROR(NegativeInput);
TROPICA_INPUT_ERROR(NonpositiveInput);
TROPICA_INPUT_ERROR(NotPrime);
TROPICA_INPUT_ERROR(CapacityError);
TROPICA_INPUT_ERROR(DigitRange);
TROPICA_INPUT_ERROR(GridTooCoarse);
TROPICA_INPUT_ERROR(EmptySpectrum);
TROPICA_INPUT_ERROR(ZeroTemperature);
TROPICA_INPUT_ERROR(NonpositiveTemperature);
TROPICA_INPUT_ERROR(NotAMinimizer);
TROPICA_INPUT_ERROR(NotDisjoint);
TROPICA_INPUT_ERROR(SizeMismatch);
TROPICA_INPUT_ERROR(BadSchedule);
TROPICA_INPUT_ERROR(ParseError);
TROPICA_INPUT_ERROR(IOError);

#undef TROPICA_INPUT_ERROR

}  // namespace tropica

#endif
