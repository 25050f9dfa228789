#include "rangeloc/errors.hpp"

namespace rangeloc {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::CoincidentCenters: return "CoincidentCenters";
    case ErrorCode::IndexOverflow: return "IndexOverflow";
    case ErrorCode::ZeroIndex: return "ZeroIndex";
    case ErrorCode::IndexClash: return "IndexClash";
    case ErrorCode::NoPeak: return "NoPeak";
    case ErrorCode::AmbiguousSpectrum: return "AmbiguousSpectrum";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DegenerateRadius: return "DegenerateRadius";
    case ErrorCode::AmbiguousSign: return "AmbiguousSign";
    case ErrorCode::NoWindow: return "NoWindow";
    case ErrorCode::EmptyNeighborhood: return "EmptyNeighborhood";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::Io: return "IoError";
    }
    return "Unknown";
}

}  // namespace rangeloc
