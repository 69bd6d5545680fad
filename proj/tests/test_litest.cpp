#include <gtest/gtest.h>

#include "locind/litest.hpp"
#include "locind/simulator.hpp"
#include "support.hpp"

using namespace locind;

namespace {

MarkedEventSequence observed_l3(std::uint64_t seed, double horizon = 1000)
{
    auto s = build_benchmark_structure("L3");
    SimulationConfig sim;
    sim.horizon = horizon;
    sim.seed = seed;
    return restrict_to_observed(simulate_hawkes(s.spec, sim), s.observed).events;
}

MarkedEventSequence relabel(const MarkedEventSequence& seq, const std::vector<int>& perm)
{
    std::vector<int> marks(seq.marks().begin(), seq.marks().end());
    for (int& m : marks)
        m = perm[static_cast<std::size_t>(m)];
    return validate_events({seq.times().begin(), seq.times().end()}, marks, seq.window(), seq.dim());
}

} // namespace

TEST(LITest, RelabelingEquivariance)
{
    auto seq = observed_l3(1);
    const std::vector<int> perm{1, 2, 0};
    auto other = relabel(seq, perm);
    for (int order : {1, 2}) {
        LITestConfig cfg;
        cfg.order = order;
        auto a = test_local_independence(seq, 0, 2, {1}, cfg);
        auto b = test_local_independence(other, perm[0], perm[2], {perm[1]}, cfg);
        EXPECT_NEAR(a.p_value(), b.p_value(), 1e-9);
        EXPECT_NEAR(a.wald.statistic, b.wald.statistic, 1e-8 * std::max(1.0, a.wald.statistic));
    }
}

TEST(LITest, OrderNesting)
{
    auto seq = observed_l3(2);
    LITestConfig cfg;
    cfg.fit.kappa = 0;
    cfg.order = 1;
    auto d1 = local_independence_design(seq, 0, 2, {1}, cfg);
    auto r1 = test_local_independence(seq, 0, 2, {1}, cfg);
    cfg.order = 2;
    auto d2 = local_independence_design(seq, 0, 2, {1}, cfg);
    auto r2 = test_local_independence(seq, 0, 2, {1}, cfg);
    EXPECT_GT(d2.layout.columns(), d1.layout.columns());
    for (const auto& blk : d1.layout.blocks()) {
        const auto& other = d2.layout.find(blk.name());
        EXPECT_EQ(d1.quadrature.middleCols(blk.offset, blk.size),
                  d2.quadrature.middleCols(other.offset, other.size));
        EXPECT_EQ(d1.events.middleCols(blk.offset, blk.size), d2.events.middleCols(other.offset, other.size));
    }
    EXPECT_GE(r2.fit->loglik, r1.fit->loglik - 1e-8 * std::abs(r1.fit->loglik));
}

TEST(LITest, Deterministic)
{
    auto seq = observed_l3(3);
    LITestConfig cfg;
    auto a = test_local_independence(seq, 0, 2, {1}, cfg);
    auto b = test_local_independence(seq, 0, 2, {1}, cfg);
    EXPECT_EQ(a.p_value(), b.p_value());
    EXPECT_EQ(a.fit->coefficients, b.fit->coefficients);
}

TEST(LITest, CacheGivesSameResult)
{
    auto seq = observed_l3(4);
    LITestConfig cfg;
    FeatureCache cache(seq, cfg.basis(), cfg.grid_step);
    for (auto [j, k] : {std::pair{0, 2}, {2, 0}, {1, 2}}) {
        const int c = 3 - j - k;
        auto a = test_local_independence(seq, j, k, {c}, cfg, &cache);
        auto b = test_local_independence(seq, j, k, {c}, cfg);
        EXPECT_EQ(a.p_value(), b.p_value());
    }
}

TEST(LITest, MissingMark)
{
    auto seq = validate_events({1.0, 2.0, 3.0}, {0, 0, 2}, Window{0, 100}, 3);
    LITestConfig cfg;
    auto r = test_local_independence(seq, 1, 0, {}, cfg);
    EXPECT_TRUE(r.mark_missing);
    EXPECT_EQ(r.p_value(), 1.0);
    EXPECT_FALSE(r.reject);
    EXPECT_FALSE(r.warnings.empty());
    EXPECT_THROW(local_independence_design(seq, 1, 0, {}, cfg), Error);
}

TEST(LITest, ArgumentErrors)
{
    auto seq = observed_l3(5, 200);
    LITestConfig cfg;
    EXPECT_THROW(test_local_independence(seq, 0, 0, {}, cfg), Error);
    EXPECT_THROW(test_local_independence(seq, 0, 2, {0}, cfg), Error);
    try {
        test_local_independence(seq, 0, 3, {}, cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::MarkOutOfRange);
    }
    cfg.order = 3;
    EXPECT_THROW(test_local_independence(seq, 0, 2, {}, cfg), Error);
    cfg.order = 2;
    cfg.alpha = 1.5;
    EXPECT_THROW(cfg.validate(), Error);
    cfg.alpha = 0.05;
    cfg.num_basis = 2;
    EXPECT_THROW(cfg.validate(), Error);
}

TEST(LITest, KappaGridRecorded)
{
    auto seq = observed_l3(6);
    LITestConfig cfg;
    cfg.kappa_grid = {0.1, 1.0, 10.0};
    auto r = test_local_independence(seq, 0, 2, {1}, cfg);
    ASSERT_TRUE(r.kappa_selection);
    EXPECT_EQ(r.fit->kappa, r.kappa_selection->kappa);
    EXPECT_GE(r.p_value(), 0.0);
    EXPECT_LE(r.p_value(), 1.0);
}

TEST(LITest, InhibitionDetected)
{
    auto s = build_benchmark_structure("P1");
    int rejected = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SimulationConfig sim;
        sim.seed = seed;
        auto seq = simulate_hawkes(s.spec, sim);
        LITestConfig cfg;
        cfg.order = 1;
        rejected += test_local_independence(seq, s.j, s.k, {}, cfg).reject;
    }
    EXPECT_GE(rejected, 6);
}
