#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

#include "locind/error.hpp"
#include "locind/wald.hpp"

using namespace locind;

namespace {

FittedIntensityModel block_fit(const Eigen::VectorXd& beta, const Eigen::MatrixXd& cov)
{
    FittedIntensityModel fit;
    fit.layout = DesignLayout(static_cast<int>(beta.size()), {}, 1, 0);
    fit.coefficients = Eigen::VectorXd::Zero(fit.layout.columns());
    fit.covariance = Eigen::MatrixXd::Identity(fit.layout.columns(), fit.layout.columns());
    const auto& t = fit.layout.find("test[0]");
    fit.coefficients.segment(t.offset, t.size) = beta;
    fit.covariance.block(t.offset, t.offset, t.size, t.size) = cov;
    return fit;
}

Eigen::MatrixXd random_spd(int n, unsigned seed)
{
    std::srand(seed);
    Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n);
    return a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
}

} // namespace

TEST(ChiSquare, KnownValues)
{
    EXPECT_EQ(chi2_upper_tail(0.0, 3), 1.0);
    EXPECT_NEAR(chi2_upper_tail(2 * std::log(20.0), 2), 0.05, 1e-14);
    EXPECT_NEAR(chi2_upper_tail(5.991, 2), 0.05, 1e-3);
    EXPECT_NEAR(chi2_upper_tail(3.841, 1), 0.05, 1e-3);
}

TEST(ChiSquare, MatchesBoost)
{
    for (double df : {1.0, 2.0, 3.0, 6.0, 15.0, 40.0})
        for (double x = 0.01; x < 120; x *= 1.13) {
            const double ref = boost::math::gamma_q(df / 2, x / 2);
            EXPECT_NEAR(chi2_upper_tail(x, df), ref, 1e-12 + 1e-10 * ref) << df << " " << x;
        }
}

TEST(ChiSquare, Monotone)
{
    for (double df : {1.0, 4.0, 6.0}) {
        double prev = 1.0;
        for (double x = 0.0; x < 60; x += 0.05) {
            const double p = chi2_upper_tail(x, df);
            EXPECT_LE(p, prev);
            prev = p;
        }
    }
}

TEST(Wald, ZeroCoefficients)
{
    SplineBasis b(5.0, 6, 3);
    auto fit = block_fit(Eigen::VectorXd::Zero(6), random_spd(6, 1));
    auto r = wald_grid_test(fit, "test[0]", b, 6);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.df, 6);
}

TEST(Wald, SinglePoint)
{
    SplineBasis b(5.0, 6, 3);
    Eigen::VectorXd beta(6);
    beta << 0.3, -0.1, 0.2, 0.05, -0.4, 0.1;
    Eigen::MatrixXd cov = random_spd(6, 2);
    auto r = wald_grid_test(block_fit(beta, cov), "test[0]", b, 1);
    ASSERT_EQ(r.grid.size(), 1u);
    EXPECT_DOUBLE_EQ(r.grid[0], 2.5);
    Eigen::VectorXd row = b.evaluate(2.5);
    const double stat = std::pow(row.dot(beta), 2) / row.dot(cov * row);
    EXPECT_NEAR(r.statistic, stat, 1e-10 * stat);
    EXPECT_EQ(r.df, 1);
    EXPECT_NEAR(r.p_value, boost::math::gamma_q(0.5, stat / 2), 1e-12);
}

TEST(Wald, FullRankGridIsBasisFree)
{
    // With M = K the grid matrix is invertible, so the statistic equals the
    // coefficient-space form, whatever basis represents the function.
    SplineBasis b(5.0, 6, 3);
    for (unsigned s = 0; s < 10; ++s) {
        Eigen::MatrixXd cov = random_spd(6, 10 + s);
        Eigen::VectorXd beta = Eigen::VectorXd::Random(6);
        auto r = wald_grid_test(block_fit(beta, cov), "test[0]", b, 6);
        const double ref = beta.dot(cov.ldlt().solve(beta));
        EXPECT_NEAR(r.statistic, ref, 1e-7 * ref);
        EXPECT_EQ(r.df, 6);
        Eigen::VectorXd expect_values(6);
        for (int m = 0; m < 6; ++m)
            expect_values(m) = b.evaluate(5.0 * (m + 0.5) / 6).dot(beta);
        EXPECT_LT((r.kernel_values - expect_values).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Wald, DegenerateCovariance)
{
    SplineBasis b(5.0, 6, 3);
    auto fit = block_fit(Eigen::VectorXd::Ones(6), Eigen::MatrixXd::Zero(6, 6));
    EXPECT_THROW(wald_grid_test(fit, "test[0]", b, 6), Error);
    EXPECT_THROW(wald_grid_test(fit, "first[3]", b, 6), Error);
}
