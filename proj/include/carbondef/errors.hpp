#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace carbondef {

/// Broad class of a failure; the CLI maps it to an exit code.
enum class ErrorCategory { validation, io };

/// Base of every error raised by the library.
///
/// `location()` names where in the input the problem was found, e.g.
/// "line 4", "byte 17", "/entries/2" or "sample 3". It is empty when the
/// error is not tied to an input position.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message, std::string location = {})
        : std::runtime_error(location.empty() ? message : location + ": " + message),
          location_(std::move(location)) {}

    const std::string& location() const noexcept { return location_; }

    virtual ErrorCategory category() const noexcept = 0;
    virtual const char* kind() const noexcept = 0;

private:
    std::string location_;
};

class ValidationError : public Error {
public:
    using Error::Error;
    ErrorCategory category() const noexcept override { return ErrorCategory::validation; }
};

class IoError : public Error {
public:
    using Error::Error;
    ErrorCategory category() const noexcept override { return ErrorCategory::io; }
};

#define CARBONDEF_DEFINE_ERROR(Name, Base)                                   \
    class Name : public Base {                                              \
    public:                                                                 \
        using Base::Base;                                                   \
        const char* kind() const noexcept override { return #Name; }        \
    };

// server model
CARBONDEF_DEFINE_ERROR(SpecError, ValidationError)
CARBONDEF_DEFINE_ERROR(AllocationError, ValidationError)
CARBONDEF_DEFINE_ERROR(SampleError, ValidationError)
CARBONDEF_DEFINE_ERROR(UsageOutOfRange, ValidationError)
CARBONDEF_DEFINE_ERROR(TraceOrderError, ValidationError)

// grid integration
CARBONDEF_DEFINE_ERROR(CoverageError, ValidationError)
CARBONDEF_DEFINE_ERROR(OracleResolutionError, ValidationError)
CARBONDEF_DEFINE_ERROR(OverlapError, ValidationError)
CARBONDEF_DEFINE_ERROR(IntervalError, ValidationError)
CARBONDEF_DEFINE_ERROR(NegativeIntensityError, ValidationError)

// embodied ledger
CARBONDEF_DEFINE_ERROR(DurationError, ValidationError)
CARBONDEF_DEFINE_ERROR(ProfileOutOfLifespan, ValidationError)
CARBONDEF_DEFINE_ERROR(FractionError, ValidationError)
CARBONDEF_DEFINE_ERROR(OversubscriptionError, ValidationError)
CARBONDEF_DEFINE_ERROR(ReferenceError, ValidationError)
CARBONDEF_DEFINE_ERROR(UnknownObject, ValidationError)

// composition
CARBONDEF_DEFINE_ERROR(NegativeInput, ValidationError)
CARBONDEF_DEFINE_ERROR(ZeroFunctionalUnits, ValidationError)

// ingestion
CARBONDEF_DEFINE_ERROR(ParseError, ValidationError)
CARBONDEF_DEFINE_ERROR(SchemaError, ValidationError)
CARBONDEF_DEFINE_ERROR(FileError, IoError)
CARBONDEF_DEFINE_ERROR(NetworkError, IoError)
CARBONDEF_DEFINE_ERROR(StaleCacheError, IoError)

#undef CARBONDEF_DEFINE_ERROR

}  // namespace carbondef
