#include "locind/stats.hpp"

#include <algorithm>
#include <cmath>

#include "locind/error.hpp"

namespace locind {

double ks_distance_uniform(std::vector<double> u)
{
    if (u.empty())
        throw Error(Errc::InvalidArgument, "KS distance of an empty sample");
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        d = std::max(d, static_cast<double>(i + 1) / n - u[i]);
        d = std::max(d, u[i] - static_cast<double>(i) / n);
    }
    return d;
}

double ks_p_value(double distance, std::size_t n)
{
    if (n == 0)
        return 1.0;
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
    if (lambda < 1e-3)
        return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16)
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        throw Error(Errc::InvalidArgument, "quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values)
{
    return quantile(std::move(values), 0.5);
}

double Proportion::value() const
{
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

double Proportion::standard_error() const
{
    if (trials == 0)
        return 0.0;
    const double p = value();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

} // namespace locind
