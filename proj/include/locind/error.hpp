#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace locind {

enum class Errc {
    InvalidArgument,
    LengthMismatch,
    DuplicateTime,
    MarkOutOfRange,
    TimeOutsideWindow,
    NonFiniteValue,
    DomainError,
    NoConvergence,
    ExplosionGuard,
    UnknownStructure,
    EmptyObservedSet,
    InvalidBasisSpec,
    GridTooCoarse,
    DimensionMismatch,
    SingularInformation,
    DegenerateCovariance,
    Io,
    Parse,
};

const char* to_string(Errc code);

// All library failures are reported as Error; code() identifies the category.
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

// Non-fatal diagnostics collected by operations that continue after a
// questionable input (non-stationary spec, empty target, ...).
using Warnings = std::vector<std::string>;

} // namespace locind
