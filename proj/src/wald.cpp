#include "locind/wald.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "locind/error.hpp"

namespace locind {

namespace {

double lower_series(double a, double x)
{
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17)
            break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_fraction(double a, double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16)
            break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double regularized_gamma_q(double a, double x)
{
    if (!(a > 0))
        throw Error(Errc::DomainError, "gamma shape must be positive");
    if (std::isnan(x))
        throw Error(Errc::DomainError, "gamma argument is NaN");
    if (x <= 0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return std::max(0.0, 1.0 - lower_series(a, x));
    return std::min(1.0, upper_fraction(a, x));
}

double chi2_upper_tail(double x, double df)
{
    if (!(df > 0))
        throw Error(Errc::DomainError, "chi-square degrees of freedom must be positive");
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

WaldResult wald_grid_test(const FittedIntensityModel& fit, const std::string& block_name,
                          const SplineBasis& basis, int grid_points)
{
    if (grid_points < 1)
        throw Error(Errc::InvalidArgument, "Wald grid needs at least one point");
    const FeatureBlock& block = fit.layout.find(block_name);
    if (block.size != basis.size())
        throw Error(Errc::DimensionMismatch, "block '" + block_name + "' is not a univariate basis block");

    const Eigen::VectorXd coef = fit.block_coefficients(block);
    const Eigen::MatrixXd cov = fit.block_covariance(block);
    if (cov.cwiseAbs().maxCoeff() == 0.0)
        throw Error(Errc::DegenerateCovariance, "covariance of block '" + block_name + "' is zero");

    WaldResult out;
    Eigen::MatrixXd b(grid_points, basis.size());
    for (int m = 0; m < grid_points; ++m) {
        const double x = basis.support() * (m + 0.5) / grid_points;
        out.grid.push_back(x);
        b.row(m) = basis.evaluate(x).transpose();
    }
    out.kernel_values = b * coef;

    Eigen::MatrixXd v = b * cov * b.transpose();
    v = 0.5 * (v + v.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
    if (eig.info() != Eigen::Success)
        throw Error(Errc::NoConvergence, "eigen-decomposition of Wald covariance failed");
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const double largest = lambda.cwiseAbs().maxCoeff();
    if (largest == 0.0)
        throw Error(Errc::DegenerateCovariance, "Wald covariance on the grid is zero");
    const Eigen::VectorXd proj = eig.eigenvectors().transpose() * out.kernel_values;
    double stat = 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (std::abs(lambda(i)) <= 1e-10 * largest)
            continue;
        ++rank;
        stat += proj(i) * proj(i) / lambda(i);
    }
    out.statistic = std::max(0.0, stat);
    out.df = rank;
    out.p_value = chi2_upper_tail(out.statistic, rank);
    return out;
}

} // namespace locind
