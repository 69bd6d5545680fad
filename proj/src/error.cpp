#include "locind/error.hpp"

namespace locind {

const char* to_string(Errc code)
{
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DuplicateTime: return "DuplicateTime";
    case Errc::MarkOutOfRange: return "MarkOutOfRange";
    case Errc::TimeOutsideWindow: return "TimeOutsideWindow";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::DomainError: return "DomainError";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::ExplosionGuard: return "ExplosionGuard";
    case Errc::UnknownStructure: return "UnknownStructure";
    case Errc::EmptyObservedSet: return "EmptyObservedSet";
    case Errc::InvalidBasisSpec: return "InvalidBasisSpec";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::SingularInformation: return "SingularInformation";
    case Errc::DegenerateCovariance: return "DegenerateCovariance";
    case Errc::Io: return "Io";
    case Errc::Parse: return "Parse";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

} // namespace locind
