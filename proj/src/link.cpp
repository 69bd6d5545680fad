#include "locind/link.hpp"

#include <cmath>

#include "locind/error.hpp"

namespace locind {

double Link::eval(double x) const
{
    switch (kind_) {
    case LinkKind::Identity:
        return x;
    case LinkKind::Log:
        if (!(x > 0))
            throw Error(Errc::DomainError, "log link evaluated at nonpositive intensity");
        return std::log(x);
    case LinkKind::PiecewiseLogLinear:
        if (!(x > 0))
            throw Error(Errc::DomainError, "piecewise link evaluated at nonpositive intensity");
        return x >= 1.0 ? x : std::log(x) + 1.0;
    }
    return x;
}

double Link::inverse(double y) const
{
    switch (kind_) {
    case LinkKind::Identity: return y;
    case LinkKind::Log: return std::exp(y);
    case LinkKind::PiecewiseLogLinear: return y >= 1.0 ? y : std::exp(y - 1.0);
    }
    return y;
}

double Link::inverse_derivative(double y) const
{
    switch (kind_) {
    case LinkKind::Identity: return 1.0;
    case LinkKind::Log: return std::exp(y);
    case LinkKind::PiecewiseLogLinear: return y >= 1.0 ? 1.0 : std::exp(y - 1.0);
    }
    return 1.0;
}

double Link::inverse_second_derivative(double y) const
{
    switch (kind_) {
    case LinkKind::Identity: return 0.0;
    case LinkKind::Log: return std::exp(y);
    // Right-hand value at the knot.
    case LinkKind::PiecewiseLogLinear: return y >= 1.0 ? 0.0 : std::exp(y - 1.0);
    }
    return 0.0;
}

std::string_view to_string(LinkKind kind)
{
    switch (kind) {
    case LinkKind::Identity: return "identity";
    case LinkKind::Log: return "log";
    case LinkKind::PiecewiseLogLinear: return "piecewise";
    }
    return "piecewise";
}

Link parse_link(std::string_view name)
{
    if (name == "identity")
        return Link(LinkKind::Identity);
    if (name == "log")
        return Link(LinkKind::Log);
    if (name == "piecewise" || name == "piecewise-log-linear")
        return Link(LinkKind::PiecewiseLogLinear);
    throw Error(Errc::Parse, "unknown link '" + std::string(name)
                                 + "' (expected identity, log or piecewise)");
}

} // namespace locind
