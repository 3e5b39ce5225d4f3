#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curveflow {

enum class ErrorCode {
    InvalidArgument,
    DomainError,
    NonFiniteSample,
    ToleranceNotMet,
    SingularityEncountered,
    NoRoots,
    OutsideValidity,
    DerivativeUnavailable,
    NondegeneracyViolated,
    AltFormUnavailable,
    EmptyDomain,
    OnBreakingParabola,
    DegenerateScaling,
    SingularLeadingCoefficient,
    OffTrajectory,
    UnsupportedOrder,
    ConfigError,
    IoError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace curveflow
