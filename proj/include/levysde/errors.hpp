#pragma once

#include <stdexcept>
#include <string>

namespace levysde {

// Base of every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LEVYSDE_DEFINE_ERROR(Name)                                             \
    class Name : public Error {                                                \
    public:                                                                    \
        using Error::Error;                                                    \
    }

LEVYSDE_DEFINE_ERROR(DomainError);
LEVYSDE_DEFINE_ERROR(SingularScaleError);
LEVYSDE_DEFINE_ERROR(DimensionError);
LEVYSDE_DEFINE_ERROR(UnsupportedMoment);
LEVYSDE_DEFINE_ERROR(OriginError);
LEVYSDE_DEFINE_ERROR(NonFiniteState);
LEVYSDE_DEFINE_ERROR(NoProgressError);
LEVYSDE_DEFINE_ERROR(SingularGammaError);
LEVYSDE_DEFINE_ERROR(NotPositiveDefiniteError);
LEVYSDE_DEFINE_ERROR(SingularJacobianError);
LEVYSDE_DEFINE_ERROR(StudyFailedError);
LEVYSDE_DEFINE_ERROR(FormatError);
LEVYSDE_DEFINE_ERROR(ConfigError);

#undef LEVYSDE_DEFINE_ERROR

} // namespace levysde
