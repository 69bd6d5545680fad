#include "locind/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace locind {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double intensity_floor = 1e-300;

void check_shapes(const Eigen::VectorXd& beta, const DesignMatrix& design,
                  const Eigen::MatrixXd& omega)
{
    const Eigen::Index p = design.layout.columns();
    if (beta.size() != p || design.quadrature.cols() != p || design.events.cols() != p
        || omega.rows() != p || omega.cols() != p || design.weights.size() != design.quadrature.rows()) {
        std::ostringstream os;
        os << "coefficients " << beta.size() << ", design columns " << p << ", penalty "
           << omega.rows() << "x" << omega.cols();
        throw Error(Errc::DimensionMismatch, os.str());
    }
}

// log f(y) computed without forming f where the link allows it.
double log_inverse(const Link& link, double y)
{
    switch (link.kind()) {
    case LinkKind::Identity: return y > 0 ? std::log(y) : neg_inf;
    case LinkKind::Log: return y;
    case LinkKind::PiecewiseLogLinear: return y >= 1.0 ? std::log(y) : y - 1.0;
    }
    return neg_inf;
}

// Second derivative of log f at y (always <= 0 for the supported links).
double log_inverse_curvature(const Link& link, double y)
{
    const double f = link.inverse(y);
    const double f1 = link.inverse_derivative(y);
    const double f2 = link.inverse_second_derivative(y);
    if (link.kind() == LinkKind::Log || (link.kind() == LinkKind::PiecewiseLogLinear && y < 1.0))
        return 0.0;
    return f2 / f - (f1 / f) * (f1 / f);
}

// A += sign * X' diag(w) X for w >= 0, lower triangle only.
void weighted_gram_update(Eigen::MatrixXd& a, const Eigen::MatrixXd& x, const Eigen::VectorXd& w,
                          double sign)
{
    if (x.rows() == 0)
        return;
    Eigen::MatrixXd xw = x.array().colwise() * w.array().sqrt();
    a.selfadjointView<Eigen::Lower>().rankUpdate(xw.transpose(), sign);
}

void fill_upper(Eigen::MatrixXd& a)
{
    a.triangularView<Eigen::StrictlyUpper>() = a.transpose().triangularView<Eigen::StrictlyUpper>();
}

} // namespace

double penalized_loglik(const Eigen::VectorXd& beta, const DesignMatrix& design, const Link& link,
                        const Eigen::MatrixXd& omega, double kappa)
{
    check_shapes(beta, design, omega);
    const Eigen::VectorXd ye = design.events * beta;
    double value = 0.0;
    for (Eigen::Index i = 0; i < ye.size(); ++i) {
        const double lf = log_inverse(link, ye(i));
        if (!std::isfinite(lf))
            return neg_inf;
        value += lf;
    }
    const Eigen::VectorXd yq = design.quadrature * beta;
    for (Eigen::Index g = 0; g < yq.size(); ++g)
        value -= design.weights(g) * link.inverse(yq(g));
    if (kappa != 0.0)
        value -= kappa * beta.dot(omega * beta);
    return value;
}

LikelihoodDerivatives penalized_loglik_derivatives(const Eigen::VectorXd& beta,
                                                   const DesignMatrix& design, const Link& link,
                                                   const Eigen::MatrixXd& omega, double kappa,
                                                   bool with_hessian)
{
    check_shapes(beta, design, omega);
    const Eigen::Index p = beta.size();
    LikelihoodDerivatives out;
    out.value = penalized_loglik(beta, design, link, omega, kappa);
    out.finite = std::isfinite(out.value);
    if (!out.finite)
        return out;

    const Eigen::VectorXd ye = design.events * beta;
    const Eigen::VectorXd yq = design.quadrature * beta;

    Eigen::VectorXd score_e(ye.size());
    Eigen::VectorXd curv_e(ye.size());
    for (Eigen::Index i = 0; i < ye.size(); ++i) {
        const double f = link.inverse(ye(i));
        score_e(i) = link.inverse_derivative(ye(i)) / f;
        curv_e(i) = -log_inverse_curvature(link, ye(i));
    }
    Eigen::VectorXd score_q(yq.size());
    Eigen::VectorXd curv_q(yq.size());
    for (Eigen::Index g = 0; g < yq.size(); ++g) {
        score_q(g) = design.weights(g) * link.inverse_derivative(yq(g));
        curv_q(g) = design.weights(g) * link.inverse_second_derivative(yq(g));
    }

    out.gradient = design.events.transpose() * score_e - design.quadrature.transpose() * score_q;
    if (kappa != 0.0)
        out.gradient -= 2.0 * kappa * (omega * beta);

    if (with_hessian) {
        out.hessian = Eigen::MatrixXd::Zero(p, p);
        weighted_gram_update(out.hessian, design.events, curv_e, -1.0);
        weighted_gram_update(out.hessian, design.quadrature, curv_q, -1.0);
        fill_upper(out.hessian);
        if (kappa != 0.0)
            out.hessian -= 2.0 * kappa * omega;
    }
    return out;
}

Eigen::VectorXd FittedIntensityModel::block_coefficients(const FeatureBlock& block) const
{
    return coefficients.segment(block.offset, block.size);
}

Eigen::MatrixXd FittedIntensityModel::block_covariance(const FeatureBlock& block) const
{
    return covariance.block(block.offset, block.offset, block.size, block.size);
}

namespace {

Eigen::VectorXd initial_coefficients(const DesignMatrix& design, const Link& link)
{
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.layout.columns());
    const double length = design.weights.sum();
    const double rate = std::max<double>(static_cast<double>(design.events.rows()), 0.5) / length;
    beta(0) = link.eval(rate);
    return beta;
}

// Solve (A + tau I) x = b with tau escalated from 0 until A + tau I is
// positive definite. Returns the number of escalations.
int solve_with_ridge(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double jitter,
                     Eigen::VectorXd& x)
{
    const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
    double tau = 0.0;
    for (int escalation = 0; escalation < 40; ++escalation) {
        Eigen::MatrixXd shifted = a;
        shifted.diagonal().array() += tau;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            x = llt.solve(b);
            if (x.allFinite())
                return escalation;
        }
        tau = tau == 0.0 ? jitter * scale : tau * 10.0;
    }
    throw Error(Errc::SingularInformation, "negative Hessian not positive definite after ridge escalation");
}

} // namespace

FittedIntensityModel fit_mle(const DesignMatrix& design, const Link& link,
                             const Eigen::MatrixXd& omega, const FitConfig& config,
                             Warnings* warnings)
{
    if (!(config.kappa >= 0))
        throw Error(Errc::InvalidArgument, "penalty weight must be nonnegative");
    if (config.max_iterations < 1 || config.max_step_halvings < 0 || !(config.gradient_tolerance > 0)
        || !(config.ridge_jitter > 0))
        throw Error(Errc::InvalidArgument, "invalid fit configuration");
    if (design.events.rows() == 0 && warnings)
        warnings->push_back("no target events: fitting the compensator only");

    FittedIntensityModel fit;
    fit.layout = design.layout;
    fit.kappa = config.kappa;
    const double kappa = config.kappa;

    Eigen::VectorXd beta = initial_coefficients(design, link);
    LikelihoodDerivatives cur = penalized_loglik_derivatives(beta, design, link, omega, kappa);
    if (!cur.finite)
        throw Error(Errc::DomainError, "starting point has a nonpositive event intensity");
    ConvergenceReport& report = fit.convergence;
    report.objective_trace.push_back(cur.value);

    for (int it = 0; it < config.max_iterations; ++it) {
        report.gradient_norm = cur.gradient.norm();
        if (report.gradient_norm <= config.gradient_tolerance * std::max(1.0, std::abs(cur.value))) {
            report.converged = true;
            report.message = "gradient tolerance reached";
            break;
        }
        Eigen::VectorXd step;
        report.ridge_escalations += solve_with_ridge(-cur.hessian, cur.gradient, config.ridge_jitter, step);

        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd candidate;
        double value = 0.0;
        for (int h = 0; h <= config.max_step_halvings; ++h, t *= 0.5) {
            candidate = beta + t * step;
            value = penalized_loglik(candidate, design, link, omega, kappa);
            if (std::isfinite(value) && value >= cur.value) {
                accepted = true;
                break;
            }
        }
        ++report.iterations;
        if (!accepted) {
            // No ascent possible along the Newton direction: stationary up to
            // rounding if the Newton decrement is negligible.
            const double decrement = cur.gradient.dot(step);
            report.converged = decrement <= 1e-10 * std::max(1.0, std::abs(cur.value));
            report.message = report.converged ? "objective stationary to rounding"
                                              : "line search failed";
            break;
        }
        beta = candidate;
        cur = penalized_loglik_derivatives(beta, design, link, omega, kappa);
        report.objective_trace.push_back(cur.value);
        if (it + 1 == config.max_iterations) {
            report.gradient_norm = cur.gradient.norm();
            report.converged = report.gradient_norm
                               <= config.gradient_tolerance * std::max(1.0, std::abs(cur.value));
            report.message = report.converged ? "gradient tolerance reached" : "iteration limit reached";
        }
    }
    if (!report.converged && warnings)
        warnings->push_back("NoConvergence: " + report.message);

    fit.coefficients = beta;
    fit.penalized_loglik = cur.value;
    fit.loglik = cur.value + kappa * beta.dot(omega * beta);

    // Fisher information on the quadrature grid.
    const Eigen::VectorXd yq = design.quadrature * beta;
    Eigen::VectorXd wq(yq.size());
    for (Eigen::Index g = 0; g < yq.size(); ++g) {
        const double f = std::max(link.inverse(yq(g)), intensity_floor);
        const double f1 = link.inverse_derivative(yq(g));
        wq(g) = design.weights(g) * f1 * f1 / f;
    }
    const Eigen::Index p = beta.size();
    fit.fisher = Eigen::MatrixXd::Zero(p, p);
    weighted_gram_update(fit.fisher, design.quadrature, wq, 1.0);
    fill_upper(fit.fisher);
    const double penalty_sign = config.hessian_information ? 1.0 : -1.0;
    fit.information = fit.fisher + penalty_sign * 2.0 * kappa * omega;

    const double scale = std::max(1.0, fit.information.diagonal().cwiseAbs().maxCoeff());
    double tau = 0.0;
    Eigen::MatrixXd inv;
    for (int escalation = 0;; ++escalation) {
        Eigen::MatrixXd shifted = fit.information;
        shifted.diagonal().array() += tau;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
        if (ldlt.info() == Eigen::Success && ldlt.rcond() > 1e-14) {
            inv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
            if (inv.allFinite())
                break;
        }
        if (escalation >= 12)
            throw Error(Errc::SingularInformation, "information matrix singular after jitter escalation");
        tau = tau == 0.0 ? config.ridge_jitter * scale : tau * 10.0;
    }
    fit.information_jitter = tau;
    if (tau > 0 && warnings) {
        std::ostringstream os;
        os << "information matrix regularized with jitter " << tau;
        warnings->push_back(os.str());
    }
    inv = 0.5 * (inv + inv.transpose());
    Eigen::MatrixXd sigma = inv * fit.fisher * inv;
    fit.covariance = 0.5 * (sigma + sigma.transpose());
    fit.bias_mean = beta - penalty_sign * 2.0 * kappa * (inv * (omega * beta));
    return fit;
}

} // namespace locind

namespace locind {

DesignMatrix design_rows_in(const DesignMatrix& design, double from, double to)
{
    DesignMatrix out;
    out.layout = design.layout;
    out.target = design.target;
    std::vector<Eigen::Index> grid_rows, event_rows;
    for (Eigen::Index i = 0; i < design.grid.size(); ++i)
        if (design.grid[i] >= from && design.grid[i] < to)
            grid_rows.push_back(i);
    for (Eigen::Index i = 0; i < design.event_times.size(); ++i)
        if (design.event_times[i] >= from && design.event_times[i] < to)
            event_rows.push_back(i);
    const auto ng = static_cast<Eigen::Index>(grid_rows.size());
    const auto ne = static_cast<Eigen::Index>(event_rows.size());
    out.grid.resize(ng);
    out.weights.resize(ng);
    out.quadrature.resize(ng, design.quadrature.cols());
    for (Eigen::Index r = 0; r < ng; ++r) {
        const auto i = grid_rows[static_cast<std::size_t>(r)];
        out.grid[r] = design.grid[i];
        out.weights[r] = std::min(design.weights[i], to - design.grid[i]);
        out.quadrature.row(r) = design.quadrature.row(i);
    }
    out.event_times.resize(ne);
    out.events.resize(ne, design.events.cols());
    for (Eigen::Index r = 0; r < ne; ++r) {
        const auto i = event_rows[static_cast<std::size_t>(r)];
        out.event_times[r] = design.event_times[i];
        out.events.row(r) = design.events.row(i);
    }
    return out;
}

KappaSelection select_kappa_holdout(const DesignMatrix& design, const Link& link,
                                    const Eigen::MatrixXd& omega, std::vector<double> candidates,
                                    const FitConfig& config, double holdout_fraction)
{
    if (candidates.empty())
        throw Error(Errc::InvalidArgument, "kappa grid is empty");
    for (double c : candidates)
        if (!(c >= 0) || !std::isfinite(c))
            throw Error(Errc::InvalidArgument, "kappa candidates must be finite and nonnegative");
    if (!(holdout_fraction > 0 && holdout_fraction < 1))
        throw Error(Errc::InvalidArgument, "holdout fraction must lie in (0, 1)");
    if (design.grid.size() == 0)
        throw Error(Errc::InvalidArgument, "design has no quadrature rows");
    const double start = design.grid[0];
    const double end = start + design.weights.sum();
    const double split = end - holdout_fraction * (end - start);
    const DesignMatrix train = design_rows_in(design, start, split);
    const DesignMatrix test = design_rows_in(design, split, end);
    const Eigen::MatrixXd no_penalty = Eigen::MatrixXd::Zero(omega.rows(), omega.cols());

    KappaSelection sel;
    sel.candidates = candidates;
    double best = -std::numeric_limits<double>::infinity();
    sel.kappa = candidates.front();
    for (double c : candidates) {
        double score = -std::numeric_limits<double>::infinity();
        try {
            FitConfig fc = config;
            fc.kappa = c;
            const auto fit = fit_mle(train, link, omega, fc);
            score = penalized_loglik(fit.coefficients, test, link, no_penalty, 0.0);
        } catch (const Error&) {
        }
        sel.heldout_loglik.push_back(score);
        if (score > best) {
            best = score;
            sel.kappa = c;
        }
    }
    return sel;
}

} // namespace locind
