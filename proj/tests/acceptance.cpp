// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "locind/estimation.hpp"
#include "locind/experiments.hpp"
#include "locind/litest.hpp"
#include "locind/parallel.hpp"
#include "locind/penalty.hpp"
#include "locind/simulator.hpp"
#include "support.hpp"

using namespace locind;

namespace {

// Tolerances and sizes.
constexpr std::size_t kLevelReps = 200;
constexpr double kHorizon = 2000.0;
constexpr double kLevelLow = 0.02;
constexpr double kLevelHigh = 0.09;
constexpr double kL2FirstMin = 0.06;
constexpr double kPowerP12 = 0.5;
constexpr double kPowerP3 = 0.3;
constexpr std::size_t kShdReps = 20;
constexpr double kShdGapSlack = 1.0;
constexpr std::size_t kNullReps = 500;
constexpr double kNullKs = 0.08;
constexpr std::size_t kRescalingSeeds = 100;
constexpr double kRescalingHorizon = 500.0;
// Asymptotic 1% critical value of sqrt(n) * D_n.
constexpr double kKsCritical1pct = 1.628;
constexpr std::size_t kCountSeeds = 200;
constexpr double kCountHorizon = 4000.0;
constexpr double kCountFraction = 0.99;
constexpr int kFeatureCases = 1000;
constexpr double kFeatureTol = 1e-10;
constexpr int kGradientPoints = 20;
constexpr double kGradientTol = 1e-5;
constexpr std::size_t kMleSeeds = 100;
constexpr double kMleFraction = 0.95;
constexpr std::uint64_t kRoot = 7;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %s: %s | %s (%.0f s)\n", id, o.pass ? "PASS" : "FAIL", title,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
}

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

double ks_uniform(std::vector<double> u)
{
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        d = std::max({d, (i + 1) / n - u[i], u[i] - i / n});
    return d;
}

const LevelPowerResult& level_power()
{
    static const LevelPowerResult result = [] {
        LevelPowerConfig cfg;
        cfg.repetitions = kLevelReps;
        cfg.horizon = kHorizon;
        cfg.seed = kRoot;
        cfg.threads = resolve_threads(0);
        auto r = run_level_power(cfg);
        std::fputs(level_power_csv(r).c_str(), stdout);
        return r;
    }();
    return result;
}

double rate(const std::string& s, int order)
{
    return level_power().row(s, order).rejections.value();
}

std::string rates(const std::string& s)
{
    return s + " first " + fmt(rate(s, 1)) + ", second " + fmt(rate(s, 2));
}

Outcome failure_guard(Outcome o)
{
    if (!level_power().ok) {
        o.pass = false;
        o.detail += "; failure rate " + fmt(level_power().failure_rate) + " above limit";
    }
    return o;
}

Outcome criterion1()
{
    const bool ok = rate("L1", 1) >= kLevelLow && rate("L1", 1) <= kLevelHigh && rate("L1", 2) >= kLevelLow
                    && rate("L1", 2) <= kLevelHigh;
    return failure_guard({ok, rates("L1") + " (band [0.02, 0.09])"});
}

Outcome criterion2()
{
    const double f = rate("L2", 1), s = rate("L2", 2);
    const bool ok = s >= kLevelLow && s <= kLevelHigh && f > s && f >= kL2FirstMin;
    return failure_guard({ok, rates("L2") + " (second in [0.02, 0.09], first > second and >= 0.06)"});
}

Outcome criterion3()
{
    const double f = rate("L3", 1), s = rate("L3", 2);
    const double floor = 0.05 - 2 * std::sqrt(0.05 * 0.95 / kLevelReps);
    const bool ok = f >= s && s >= floor;
    return failure_guard({ok, rates("L3") + " (first >= second >= " + fmt(floor) + ")"});
}

Outcome criterion4()
{
    bool ok = true;
    for (const char* s : {"P1", "P2"})
        ok = ok && rate(s, 1) >= kPowerP12 && rate(s, 2) >= kPowerP12;
    ok = ok && rate("P3", 1) >= rate("P3", 2) && rate("P3", 2) >= kPowerP3;
    return failure_guard({ok, rates("P1") + "; " + rates("P2") + "; " + rates("P3")
                                  + " (P1, P2 >= 0.5; P3 first >= second >= 0.3)"});
}

Outcome criterion5()
{
    ShdConfig cfg;
    cfg.dims = {3, 5, 7};
    cfg.repetitions = kShdReps;
    cfg.horizon = kHorizon;
    cfg.seed = kRoot;
    cfg.threads = resolve_threads(0);
    auto r = run_shd_experiment(cfg);
    std::fputs(shd_summary_csv(r).c_str(), stdout);
    bool ok = r.ok;
    std::ostringstream os;
    double prev_gap = -1e300;
    for (int d : cfg.dims) {
        const double first = r.at(d, 1).median, second = r.at(d, 2).median;
        const double gap = first - second;
        ok = ok && second <= first && gap >= prev_gap - kShdGapSlack;
        prev_gap = gap;
        os << "d=" << d << " median first " << first << " second " << second << "; ";
    }
    if (!r.ok)
        os << "failure rate " << fmt(r.failure_rate) << " above limit";
    return {ok, os.str()};
}

Outcome criterion6()
{
    std::vector<double> p1(kNullReps), p2(kNullReps);
    parallel_for(kNullReps, resolve_threads(0), [&](std::size_t s) {
        Rng rng(derive_seed(kRoot, {6, s}));
        auto seq = oracle::poisson_sequence(rng, {0.25, 0.25}, kHorizon);
        LITestConfig cfg;
        FeatureCache cache(seq, cfg.basis(), cfg.grid_step);
        cfg.order = 1;
        p1[s] = test_local_independence(seq, 0, 1, {}, cfg, &cache).p_value();
        cfg.order = 2;
        p2[s] = test_local_independence(seq, 0, 1, {}, cfg, &cache).p_value();
    });
    const double d1 = ks_uniform(p1), d2 = ks_uniform(p2);
    return {d1 < kNullKs && d2 < kNullKs,
            "KS distance first " + fmt(d1) + ", second " + fmt(d2) + " (< 0.08, 500 seeds)"};
}

Outcome criterion7()
{
    IntensityModelSpec spec(1, {0.25});
    spec.set_kernel(0, 0, ExponentialKernel(0.4, 0.8));
    std::vector<std::vector<double>> gaps(kRescalingSeeds);
    parallel_for(kRescalingSeeds, resolve_threads(0), [&](std::size_t s) {
        SimulationConfig sim;
        sim.horizon = kRescalingHorizon;
        sim.burn_in = 0;
        sim.seed = derive_seed(kRoot, {7, s});
        gaps[s] = oracle::quadrature_gaps(spec, simulate_hawkes(spec, sim), 0);
    });
    std::vector<double> pooled;
    for (auto& g : gaps)
        pooled.insert(pooled.end(), g.begin(), g.end());
    const double d = oracle::ks_exp1(pooled);
    const double critical = kKsCritical1pct / std::sqrt(static_cast<double>(pooled.size()));

    IntensityModelSpec poisson(1, {0.25}, Link(LinkKind::Identity));
    std::size_t within = 0;
    for (std::size_t s = 0; s < kCountSeeds; ++s) {
        SimulationConfig sim;
        sim.horizon = kCountHorizon;
        sim.burn_in = 0;
        sim.seed = derive_seed(kRoot, {71, s});
        const double mean = 0.25 * kCountHorizon;
        within += std::abs(static_cast<double>(simulate_hawkes(poisson, sim).size()) - mean)
                  <= 4 * std::sqrt(mean);
    }
    const double frac = static_cast<double>(within) / kCountSeeds;
    return {d < critical && frac >= kCountFraction,
            "rescaled-gap KS " + fmt(d) + " vs 1% critical " + fmt(critical) + " over "
                + std::to_string(pooled.size()) + " gaps; Poisson counts within 4 sd in "
                + fmt(frac) + " of seeds"};
}

Outcome criterion8()
{
    Rng rng(derive_seed(kRoot, {8}));
    double worst = 0.0;
    for (int trial = 0; trial < kFeatureCases; ++trial) {
        const double S = 0.5 + 4.5 * rng.uniform();
        const int p = static_cast<int>(rng() % 4);
        const int K = p + 1 + static_cast<int>(rng() % 5);
        SplineBasis b(S, K, p);
        const int dim = 1 + static_cast<int>(rng() % 3);
        auto seq = oracle::random_sequence(rng, dim, static_cast<int>(rng() % 31), 10.0);
        const double t = 10.0 * rng.uniform();
        const int m1 = static_cast<int>(rng() % static_cast<std::uint64_t>(dim));
        const int m2 = static_cast<int>(rng() % static_cast<std::uint64_t>(dim));
        auto lib = second_order_features(seq, m1, m2, b, t);
        auto ref = oracle::brute_second(seq, m1, m2, b, t);
        if (lib.size() != ref.size())
            return {false, "feature length mismatch"};
        if (lib.size() > 0)
            worst = std::max(worst, (lib - ref).cwiseAbs().maxCoeff());
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "max abs error %.3g over %d cases", worst, kFeatureCases);
    return {worst <= kFeatureTol, buf};
}

Outcome criterion9()
{
    auto s = build_benchmark_structure("L1");
    SimulationConfig sim;
    sim.horizon = 200;
    sim.seed = derive_seed(kRoot, {9});
    auto seq = simulate_hawkes(s.spec, sim);
    SplineBasis b(5.0, 6, 3);
    auto design = build_design(seq, DesignRequest{2, {1, 2}, 2, 0}, b, 0.1);
    auto omega = roughness_penalty(design.layout, b);
    const int n = design.layout.columns();
    const double kappa = 0.7;
    Rng rng(derive_seed(kRoot, {9, 1}));
    double worst = 0.0;
    int points = 0;
    for (LinkKind kind : {LinkKind::Identity, LinkKind::Log, LinkKind::PiecewiseLogLinear}) {
        Link link(kind);
        int tested = 0;
        for (int attempt = 0; tested < kGradientPoints && attempt < 5000; ++attempt) {
            Eigen::VectorXd beta(n);
            for (int i = 0; i < n; ++i)
                beta(i) = 0.02 * (rng.uniform() - 0.5);
            beta(0) = kind == LinkKind::Identity ? 0.6 + 0.4 * rng.uniform() : rng.uniform() - 0.5;
            Eigen::VectorXd q = design.quadrature * beta, e = design.events * beta;
            if (kind == LinkKind::Identity && (q.minCoeff() < 0.05 || e.minCoeff() < 0.05))
                continue;
            if (kind == LinkKind::PiecewiseLogLinear
                && std::min((q.array() - 1).abs().minCoeff(), (e.array() - 1).abs().minCoeff()) < 1e-3)
                continue;
            ++tested;
            auto d = penalized_loglik_derivatives(beta, design, link, omega, kappa);
            const double h = 1e-7;
            Eigen::VectorXd g(n);
            Eigen::MatrixXd hess(n, n);
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd up = beta, dn = beta;
                up(i) += h;
                dn(i) -= h;
                g(i) = (penalized_loglik(up, design, link, omega, kappa)
                        - penalized_loglik(dn, design, link, omega, kappa)) / (2 * h);
                hess.col(i) = (penalized_loglik_derivatives(up, design, link, omega, kappa, false).gradient
                               - penalized_loglik_derivatives(dn, design, link, omega, kappa, false).gradient)
                              / (2 * h);
            }
            worst = std::max(worst, (d.gradient - g).cwiseAbs().maxCoeff()
                                        / std::max(1.0, d.gradient.cwiseAbs().maxCoeff()));
            worst = std::max(worst, (d.hessian - hess).cwiseAbs().maxCoeff()
                                        / std::max(1.0, d.hessian.cwiseAbs().maxCoeff()));
        }
        points += tested;
    }

    IntensityModelSpec poisson(1, {0.25}, Link(LinkKind::Identity));
    std::size_t inside = 0;
    for (std::size_t s = 0; s < kMleSeeds; ++s) {
        SimulationConfig ps;
        ps.horizon = kHorizon;
        ps.burn_in = 0;
        ps.seed = derive_seed(kRoot, {91, s});
        auto events = simulate_hawkes(poisson, ps);
        auto d = build_design(events, DesignRequest{0, {}, 1, std::nullopt}, b, 0.1);
        FitConfig cfg;
        cfg.kappa = 0;
        auto fit = fit_mle(d, Link(LinkKind::Identity), Eigen::MatrixXd::Zero(1, 1), cfg);
        inside += std::abs(fit.coefficients(0) - 0.25) < 3 * std::sqrt(0.25 / kHorizon);
    }
    const double frac = static_cast<double>(inside) / kMleSeeds;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "max relative FD error %.3g over %d points; Poisson MLE within 3 SE in %.2f of seeds",
                  worst, points, frac);
    return {worst < kGradientTol && points == 3 * kGradientPoints && frac >= kMleFraction, buf};
}

Outcome criterion10()
{
    auto level = [](int threads) {
        LevelPowerConfig cfg;
        cfg.repetitions = 3;
        cfg.horizon = 500;
        cfg.seed = kRoot;
        cfg.threads = threads;
        auto r = run_level_power(cfg);
        return level_power_csv(r) + level_power_records_csv(r);
    };
    auto shd_tables = [](int threads) {
        ShdConfig cfg;
        cfg.dims = {3, 4};
        cfg.repetitions = 2;
        cfg.horizon = 500;
        cfg.seed = kRoot;
        cfg.threads = threads;
        auto r = run_shd_experiment(cfg);
        return shd_summary_csv(r) + shd_records_csv(r);
    };
    const std::string l1 = level(1), l1b = level(1), l4 = level(4);
    const std::string s1 = shd_tables(1), s1b = shd_tables(1), s4 = shd_tables(4);
    const bool ok = l1 == l1b && l1 == l4 && s1 == s1b && s1 == s4;
    return {ok, std::string("level-power tables ") + (l1 == l1b && l1 == l4 ? "identical" : "differ")
                    + ", shd tables " + (s1 == s1b && s1 == s4 ? "identical" : "differ")
                    + " across repeated runs and 1 vs 4 threads"};
}

} // namespace

int main()
{
    report(1, "level, L1", criterion1);
    report(2, "level loss, L2", criterion2);
    report(3, "level, L3", criterion3);
    report(4, "power, P1 P2 P3", criterion4);
    report(5, "SHD first vs second order", criterion5);
    report(6, "null p-value uniformity", criterion6);
    report(7, "simulator time rescaling and Poisson counts", criterion7);
    report(8, "second-order features vs brute force", criterion8);
    report(9, "likelihood derivatives and Poisson MLE", criterion9);
    report(10, "experiment output determinism", criterion10);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
