#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define FINSLER_DEFINE_ERROR(Name)          \
    struct Name : Error {                   \
        using Error::Error;                 \
    }

FINSLER_DEFINE_ERROR(NonSmoothPoint);      // field not evaluable in a neighborhood
FINSLER_DEFINE_ERROR(DegenerateDirection); // y = 0
FINSLER_DEFINE_ERROR(StepUnderflow);       // no stable finite-difference step
FINSLER_DEFINE_ERROR(SingularMetric);      // a(x) not invertible / not SPD
FINSLER_DEFINE_ERROR(UnknownFixture);
FINSLER_DEFINE_ERROR(OutOfDomain);         // (s, sbar) outside the kernel rectangle
FINSLER_DEFINE_ERROR(DegeneratePi);        // |Pi| below tolerance
FINSLER_DEFINE_ERROR(DegenerateGamma);     // |Gamma| below tolerance
FINSLER_DEFINE_ERROR(NullDirection);       // alpha(y) = 0
FINSLER_DEFINE_ERROR(EmptyGrid);
FINSLER_DEFINE_ERROR(InvalidConfig);
FINSLER_DEFINE_ERROR(ParseError);

#undef FINSLER_DEFINE_ERROR

} // namespace finsler
