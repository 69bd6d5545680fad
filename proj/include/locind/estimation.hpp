#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locind/error.hpp"
#include "locind/features.hpp"
#include "locind/link.hpp"

namespace locind {

struct FitConfig {
    // Penalty weight kappa_0 in kappa_0 * beta' Omega beta.
    double kappa = 1.0;
    int max_iterations = 100;
    // Converged when ||gradient|| <= tolerance * max(1, |objective|).
    double gradient_tolerance = 1e-8;
    int max_step_halvings = 30;
    double ridge_jitter = 1e-8;
    // Information used in the sandwich: K_hat + 2 kappa Omega (the negative
    // Hessian of the penalized objective) when true, K_hat - 2 kappa Omega
    // when false.
    bool hessian_information = true;
};

struct LikelihoodDerivatives {
    double value = 0.0;
    bool finite = true;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

/*!
 * Penalized log-likelihood of a linear-predictor intensity model:
 *
 *   sum_events log f(x'beta) - sum_grid w f(x'beta) - kappa beta' Omega beta,
 *
 * with f = eta^{-1}. Returns -infinity when some event-row intensity is not
 * positive. Throws DimensionMismatch on inconsistent shapes.
 */
double penalized_loglik(const Eigen::VectorXd& beta, const DesignMatrix& design, const Link& link,
                        const Eigen::MatrixXd& omega, double kappa);

// Value, analytic gradient and (optionally) Hessian of penalized_loglik.
LikelihoodDerivatives penalized_loglik_derivatives(const Eigen::VectorXd& beta,
                                                   const DesignMatrix& design, const Link& link,
                                                   const Eigen::MatrixXd& omega, double kappa,
                                                   bool with_hessian = true);

struct ConvergenceReport {
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    int ridge_escalations = 0;
    // Penalized objective after every accepted step (first entry: start).
    std::vector<double> objective_trace;
    std::string message;
};

struct FittedIntensityModel {
    Eigen::VectorXd coefficients;
    DesignLayout layout;
    // K_hat = sum_grid w x x' f'(x'b)^2 / f(x'b)
    Eigen::MatrixXd fisher;
    // J_hat = K_hat -/+ 2 kappa Omega, see FitConfig::hessian_information
    Eigen::MatrixXd information;
    // Sandwich covariance J^{-1} K J^{-1}
    Eigen::MatrixXd covariance;
    // (I +/- 2 kappa J^{-1} Omega) beta_hat (sign opposite to J_hat's penalty
    // term), reported for diagnostics only
    Eigen::VectorXd bias_mean;
    double penalized_loglik = 0.0;
    double loglik = 0.0;
    double kappa = 0.0;
    double information_jitter = 0.0;
    ConvergenceReport convergence;

    Eigen::VectorXd block_coefficients(const FeatureBlock& block) const;
    Eigen::MatrixXd block_covariance(const FeatureBlock& block) const;
};

/*!
 * Penalized maximum likelihood by Newton ascent with step halving.
 *
 * Ridge jitter is added to the negative Hessian when it is not positive
 * definite. Non-convergence is reported in the result, not thrown. Throws
 * SingularInformation if J_hat stays singular after jitter escalation.
 */
FittedIntensityModel fit_mle(const DesignMatrix& design, const Link& link,
                             const Eigen::MatrixXd& omega, const FitConfig& config,
                             Warnings* warnings = nullptr);

} // namespace locind

namespace locind {

struct KappaSelection {
    double kappa = 1.0;
    std::vector<double> candidates;
    // Unpenalized log-likelihood of the held-out rows per candidate; -inf
    // where the fit failed or a held-out event intensity was not positive.
    std::vector<double> heldout_loglik;
};

// Rows of the design whose time lies in [from, to); weights are kept.
DesignMatrix design_rows_in(const DesignMatrix& design, double from, double to);

/*!
 * Pick kappa from a small grid by held-out log-likelihood: fit on the rows
 * before the last holdout_fraction of the window, score the remaining rows.
 * Never used unless requested.
 */
KappaSelection select_kappa_holdout(const DesignMatrix& design, const Link& link,
                                    const Eigen::MatrixXd& omega, std::vector<double> candidates,
                                    const FitConfig& config, double holdout_fraction = 0.2);

} // namespace locind
