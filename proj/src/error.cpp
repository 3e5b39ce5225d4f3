#include "curveflow/error.hpp"

namespace curveflow {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::SingularityEncountered: return "SingularityEncountered";
    case ErrorCode::NoRoots: return "NoRoots";
    case ErrorCode::OutsideValidity: return "OutsideValidity";
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::NondegeneracyViolated: return "NondegeneracyViolated";
    case ErrorCode::AltFormUnavailable: return "AltFormUnavailable";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::OnBreakingParabola: return "OnBreakingParabola";
    case ErrorCode::DegenerateScaling: return "DegenerateScaling";
    case ErrorCode::SingularLeadingCoefficient: return "SingularLeadingCoefficient";
    case ErrorCode::OffTrajectory: return "OffTrajectory";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace curveflow
