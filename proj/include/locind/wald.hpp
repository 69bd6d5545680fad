#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locind/bspline.hpp"
#include "locind/estimation.hpp"

namespace locind {

// Regularized upper incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

// P(chi^2_df > x).
double chi2_upper_tail(double x, double df);

struct WaldResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    std::vector<double> grid;
    // Fitted function values B * beta_hat on the grid.
    Eigen::VectorXd kernel_values;
};

/*!
 * Wald test that the function represented by a coefficient block vanishes on
 * a grid of M lags S (m - 1/2) / M, m = 1..M:
 *
 *   T = (B b)' (B Sigma_b B')^+ (B b),  df = rank(B Sigma_b B').
 *
 * Eigenvalues of B Sigma_b B' below 1e-10 times the largest are treated as zero. Throws
 * DegenerateCovariance when the block covariance is identically zero.
 */
WaldResult wald_grid_test(const FittedIntensityModel& fit, const std::string& block_name,
                          const SplineBasis& basis, int grid_points);

} // namespace locind
