#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "locind/estimation.hpp"
#include "locind/penalty.hpp"
#include "locind/simulator.hpp"
#include "locind/stats.hpp"
#include "support.hpp"

using namespace locind;

namespace {

struct Problem {
    MarkedEventSequence seq;
    DesignMatrix design;
    Eigen::MatrixXd omega;
};

Problem order2_problem(std::uint64_t seed)
{
    auto s = build_benchmark_structure("L1");
    SimulationConfig sim;
    sim.horizon = 200;
    sim.seed = seed;
    auto seq = simulate_hawkes(s.spec, sim);
    SplineBasis b(5.0, 6, 3);
    auto design = build_design(seq, DesignRequest{2, {1, 2}, 2, 0}, b, 0.1);
    auto omega = roughness_penalty(design.layout, b);
    return {seq, design, omega};
}

Eigen::VectorXd predictor_rows(const DesignMatrix& d, const Eigen::VectorXd& beta)
{
    Eigen::VectorXd q = d.quadrature * beta;
    Eigen::VectorXd e = d.events * beta;
    Eigen::VectorXd all(q.size() + e.size());
    all << q, e;
    return all;
}

double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& n)
{
    return (a - n).cwiseAbs().maxCoeff() / std::max(1.0, a.cwiseAbs().maxCoeff());
}

} // namespace

TEST(Loglik, ZeroCoefficientsPiecewise)
{
    Rng rng(1);
    auto seq = oracle::poisson_sequence(rng, {0.3}, 50.0);
    SplineBasis b(5.0, 6, 3);
    auto d = build_design(seq, DesignRequest{0, {}, 1, std::nullopt}, b, 0.1);
    ASSERT_EQ(d.layout.columns(), 1);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(1, 1);
    const double n = static_cast<double>(seq.count(0));
    EXPECT_NEAR(penalized_loglik(Eigen::VectorXd::Zero(1), d, Link{}, omega, 1.0),
                -n - 50.0 * std::exp(-1.0), 1e-10);
}

TEST(Loglik, ZeroKappaIgnoresPenalty)
{
    auto p = order2_problem(3);
    Rng rng(4);
    Eigen::MatrixXd junk = Eigen::MatrixXd::Random(p.omega.rows(), p.omega.cols());
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p.design.layout.columns());
    beta(0) = 0.5;
    const double a = penalized_loglik(beta, p.design, Link{}, junk, 0.0);
    const double z = penalized_loglik(beta, p.design, Link{}, Eigen::MatrixXd::Zero(junk.rows(), junk.cols()), 0.0);
    EXPECT_EQ(a, z);
    beta.tail(6).setConstant(0.01);
    EXPECT_NEAR(penalized_loglik(beta, p.design, Link{}, p.omega, 2.0),
                penalized_loglik(beta, p.design, Link{}, p.omega, 0.0) - 2.0 * beta.dot(p.omega * beta),
                1e-9);
}

TEST(Loglik, NonpositiveIdentityIntensity)
{
    auto p = order2_problem(5);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p.design.layout.columns());
    beta(0) = -1.0;
    EXPECT_EQ(penalized_loglik(beta, p.design, Link(LinkKind::Identity), p.omega, 1.0),
              -std::numeric_limits<double>::infinity());
}

TEST(Loglik, DerivativesMatchCentralDifferences)
{
    auto p = order2_problem(9);
    const int n = p.design.layout.columns();
    Rng rng(10);
    for (LinkKind kind : {LinkKind::Identity, LinkKind::Log, LinkKind::PiecewiseLogLinear}) {
        Link link(kind);
        int tested = 0;
        for (int attempt = 0; tested < 20 && attempt < 2000; ++attempt) {
            Eigen::VectorXd beta(n);
            for (int i = 0; i < n; ++i)
                beta(i) = 0.02 * (rng.uniform() - 0.5);
            beta(0) = kind == LinkKind::Identity ? 0.6 + 0.4 * rng.uniform() : rng.uniform() - 0.5;
            Eigen::VectorXd y = predictor_rows(p.design, beta);
            if (kind == LinkKind::Identity && (p.design.events * beta).minCoeff() < 0.05)
                continue;
            if (kind == LinkKind::PiecewiseLogLinear && (y.array() - 1.0).abs().minCoeff() < 1e-3)
                continue;
            ++tested;
            auto d = penalized_loglik_derivatives(beta, p.design, link, p.omega, 0.7);
            ASSERT_TRUE(d.finite);
            const double h = 1e-7;
            Eigen::VectorXd g(n);
            Eigen::MatrixXd hess(n, n);
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd up = beta, dn = beta;
                up(i) += h;
                dn(i) -= h;
                g(i) = (penalized_loglik(up, p.design, link, p.omega, 0.7)
                        - penalized_loglik(dn, p.design, link, p.omega, 0.7)) / (2 * h);
                hess.col(i) = (penalized_loglik_derivatives(up, p.design, link, p.omega, 0.7, false).gradient
                               - penalized_loglik_derivatives(dn, p.design, link, p.omega, 0.7, false).gradient)
                              / (2 * h);
            }
            EXPECT_LT(rel_err(d.gradient, g), 1e-5) << to_string(kind);
            EXPECT_LT(rel_err(d.hessian, hess), 1e-5) << to_string(kind);
            EXPECT_NEAR(d.value, penalized_loglik(beta, p.design, link, p.omega, 0.7), 1e-9 * std::abs(d.value));
        }
        EXPECT_EQ(tested, 20) << to_string(kind);
    }
}

TEST(Fit, SandwichIdentities)
{
    auto p = order2_problem(13);
    for (bool hessian_info : {true, false}) {
        FitConfig cfg;
        cfg.kappa = 0.5;
        cfg.hessian_information = hessian_info;
        auto fit = fit_mle(p.design, Link{}, p.omega, cfg);
        EXPECT_TRUE(fit.convergence.converged) << fit.convergence.message;
        const double sign = hessian_info ? 1.0 : -1.0;
        EXPECT_LT((fit.information - (fit.fisher + sign * 2 * 0.5 * p.omega)).cwiseAbs().maxCoeff(),
                  1e-10 * fit.fisher.cwiseAbs().maxCoeff());
        for (const Eigen::MatrixXd* m : {&fit.fisher, &fit.information, &fit.covariance})
            EXPECT_LT((*m - m->transpose()).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, m->cwiseAbs().maxCoeff()));
    }
}

TEST(Fit, ZeroKappaSandwichCollapses)
{
    auto p = order2_problem(14);
    FitConfig cfg;
    cfg.kappa = 0.0;
    auto fit = fit_mle(p.design, Link{}, p.omega, cfg);
    Eigen::MatrixXd inv = fit.fisher.inverse();
    EXPECT_LT(rel_err(fit.covariance, inv), 1e-6);
    EXPECT_LT((fit.bias_mean - fit.coefficients).norm(), 1e-12);
}

TEST(Fit, ObjectiveTraceIsMonotone)
{
    for (std::uint64_t seed : {21, 22, 23}) {
        auto p = order2_problem(seed);
        for (LinkKind kind : {LinkKind::Log, LinkKind::PiecewiseLogLinear}) {
            auto fit = fit_mle(p.design, Link(kind), p.omega, FitConfig{});
            const auto& tr = fit.convergence.objective_trace;
            ASSERT_GE(tr.size(), 2u);
            for (std::size_t i = 1; i < tr.size(); ++i)
                EXPECT_GE(tr[i], tr[i - 1]);
            EXPECT_NEAR(tr.back(), fit.penalized_loglik, 1e-9 * std::abs(tr.back()));
        }
    }
}

TEST(Fit, PoissonRateRecovered)
{
    const double T = 2000, rate = 0.25;
    SplineBasis b(5.0, 6, 3);
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        IntensityModelSpec spec(1, {rate}, Link(LinkKind::Identity));
        SimulationConfig sim;
        sim.horizon = T;
        sim.burn_in = 0;
        sim.seed = seed;
        auto seq = simulate_hawkes(spec, sim);
        auto d = build_design(seq, DesignRequest{0, {}, 1, std::nullopt}, b, 0.1);
        FitConfig cfg;
        cfg.kappa = 0;
        auto fit = fit_mle(d, Link(LinkKind::Identity), Eigen::MatrixXd::Zero(1, 1), cfg);
        // The Poisson MLE is the count over the window length.
        EXPECT_NEAR(fit.coefficients(0), static_cast<double>(seq.count(0)) / T, 1e-9);
        inside += std::abs(fit.coefficients(0) - rate) < 3 * std::sqrt(rate / T);
    }
    EXPECT_GE(inside, 95);
}

TEST(Fit, SelfExcitationMass)
{
    SplineBasis b(5.0, 6, 3);
    // Integral of each clamped B-spline over its support.
    Eigen::VectorXd mass(6);
    const auto& t = b.knots();
    for (int i = 0; i < 6; ++i)
        mass(i) = (t[static_cast<std::size_t>(i + 4)] - t[static_cast<std::size_t>(i)]) / 4.0;
    std::vector<double> estimates;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        IntensityModelSpec spec(1, {0.25}, Link(LinkKind::Identity));
        spec.set_kernel(0, 0, ExponentialKernel(0.4, 0.8));
        SimulationConfig sim;
        sim.seed = seed;
        auto seq = simulate_hawkes(spec, sim);
        auto d = build_design(seq, DesignRequest{0, {0}, 1, std::nullopt}, b, 0.1);
        auto fit = fit_mle(d, Link(LinkKind::Identity), roughness_penalty(d.layout, b), FitConfig{});
        const auto& blk = d.layout.find("first[0]");
        estimates.push_back(fit.block_coefficients(blk).dot(mass));
    }
    EXPECT_NEAR(median(estimates), 0.4, 0.25 * 0.4);
}

TEST(Fit, KappaHoldoutSelection)
{
    auto p = order2_problem(30);
    auto sel = select_kappa_holdout(p.design, Link{}, p.omega, {0.1, 1.0, 10.0}, FitConfig{});
    ASSERT_EQ(sel.candidates.size(), 3u);
    ASSERT_EQ(sel.heldout_loglik.size(), 3u);
    auto best = std::max_element(sel.heldout_loglik.begin(), sel.heldout_loglik.end());
    EXPECT_EQ(sel.kappa, sel.candidates[static_cast<std::size_t>(best - sel.heldout_loglik.begin())]);

    auto part = design_rows_in(p.design, 50.0, 120.0);
    EXPECT_GE(part.grid.minCoeff(), 50.0);
    EXPECT_LT(part.grid.maxCoeff(), 120.0);
    EXPECT_NEAR(part.weights.sum(), 70.0, 1e-9);
    for (Eigen::Index i = 0; i < part.event_times.size(); ++i) {
        EXPECT_GE(part.event_times(i), 50.0);
        EXPECT_LT(part.event_times(i), 120.0);
    }
}
