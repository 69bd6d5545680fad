#pragma once

#include <string>
#include <string_view>

namespace locind {

enum class LinkKind { Identity, Log, PiecewiseLogLinear };

/*!
 * Link function eta relating an intensity to its linear predictor:
 * eta(lambda) = predictor, lambda = eta^{-1}(predictor).
 *
 * The piecewise variant is eta(x) = x for x >= 1 and log(x) + 1 for x < 1,
 * so eta^{-1}(y) = y for y >= 1 and exp(y - 1) below the knot.
 */
class Link {
  public:
    constexpr Link() = default;
    constexpr explicit Link(LinkKind kind) : kind_(kind) {}

    constexpr LinkKind kind() const { return kind_; }

    // eta(x); throws DomainError for x <= 0 under the log and piecewise links.
    double eval(double x) const;
    double inverse(double y) const;
    double inverse_derivative(double y) const;
    double inverse_second_derivative(double y) const;

    bool operator==(const Link&) const = default;

  private:
    LinkKind kind_ = LinkKind::PiecewiseLogLinear;
};

std::string_view to_string(LinkKind kind);
// Accepts "identity", "log", "piecewise".
Link parse_link(std::string_view name);

} // namespace locind
