#include "locind/litest.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "locind/penalty.hpp"

namespace locind {

void LITestConfig::validate() const
{
    (void)basis();
    if (order != 1 && order != 2)
        throw Error(Errc::InvalidArgument, "order must be 1 or 2");
    if (!(alpha > 0 && alpha < 1))
        throw Error(Errc::InvalidArgument, "significance level must lie in (0, 1)");
    if (wald_points < 0)
        throw Error(Errc::InvalidArgument, "Wald grid size must be nonnegative");
    if (!(grid_step > 0) || !std::isfinite(grid_step))
        throw Error(Errc::InvalidArgument, "quadrature step must be positive");
    if (grid_step > support / 4)
        throw Error(Errc::GridTooCoarse, "quadrature step exceeds a quarter of the kernel support");
    if (!(fit.kappa >= 0) || !std::isfinite(fit.kappa))
        throw Error(Errc::InvalidArgument, "penalty weight must be finite and nonnegative");
}

namespace {

struct PreparedHypothesis {
    Hypothesis hypothesis;
    // Conditioning set including k when the target history is used.
    std::vector<int> full;
};

PreparedHypothesis prepare(const MarkedEventSequence& seq, int j, int k, std::vector<int> conditioning,
                           const LITestConfig& config)
{
    config.validate();
    const int d = seq.dim();
    auto check_mark = [d](int m, const char* what) {
        if (m < 0 || m >= d)
            throw Error(Errc::MarkOutOfRange, std::string(what) + " mark " + std::to_string(m)
                                                  + " out of range");
    };
    check_mark(j, "tested");
    check_mark(k, "target");
    for (int c : conditioning)
        check_mark(c, "conditioning");
    if (j == k)
        throw Error(Errc::InvalidArgument, "j = k: the target's own history is a nuisance, not a hypothesis");
    std::sort(conditioning.begin(), conditioning.end());
    conditioning.erase(std::unique(conditioning.begin(), conditioning.end()), conditioning.end());
    if (std::binary_search(conditioning.begin(), conditioning.end(), j))
        throw Error(Errc::InvalidArgument, "tested mark j must not be in the conditioning set");

    PreparedHypothesis p{Hypothesis{j, k, conditioning, config.order}, conditioning};
    if (config.include_target_history && !std::binary_search(p.full.begin(), p.full.end(), k)) {
        p.full.push_back(k);
        std::sort(p.full.begin(), p.full.end());
    }
    return p;
}

DesignMatrix make_design(const MarkedEventSequence& seq, const PreparedHypothesis& p,
                         const LITestConfig& config, const FeatureCache* cache, Warnings* warnings)
{
    const int j = p.hypothesis.j;
    const int k = p.hypothesis.k;
    const SplineBasis basis = config.basis();
    DesignRequest request{k, p.full, config.order, j};
    std::optional<FeatureCache> local;
    std::vector<int> marks = p.full;
    marks.push_back(j);
    marks.push_back(k);
    const bool usable = cache != nullptr && &cache->sequence() == &seq && cache->basis() == basis
                        && cache->grid_step() == config.grid_step
                        && std::all_of(marks.begin(), marks.end(),
                                       [&](int m) { return cache->has_mark(m); });
    if (!usable) {
        local.emplace(seq, basis, config.grid_step, std::move(marks));
        cache = &*local;
    }
    return build_design(*cache, request, warnings);
}

} // namespace

LITestResult test_local_independence(const MarkedEventSequence& seq, int j, int k,
                                     std::vector<int> conditioning, const LITestConfig& config,
                                     const FeatureCache* cache)
{
    const PreparedHypothesis prepared = prepare(seq, j, k, std::move(conditioning), config);
    LITestResult result;
    result.hypothesis = prepared.hypothesis;

    if (seq.count(j) == 0 || seq.count(k) == 0) {
        result.mark_missing = true;
        result.wald.p_value = 1.0;
        result.warnings.push_back("HypothesisMarkMissing: mark "
                                  + std::to_string(seq.count(j) == 0 ? j : k)
                                  + " has no events; p-value set to 1");
        return result;
    }

    const SplineBasis basis = config.basis();
    const DesignMatrix design = make_design(seq, prepared, config, cache, &result.warnings);
    const Eigen::MatrixXd omega = roughness_penalty(design.layout, basis);
    FitConfig fit_config = config.fit;
    if (!config.kappa_grid.empty()) {
        result.kappa_selection = select_kappa_holdout(design, config.link, omega, config.kappa_grid,
                                                      config.fit, config.kappa_holdout_fraction);
        fit_config.kappa = result.kappa_selection->kappa;
    }
    auto fit = std::make_shared<FittedIntensityModel>(
        fit_mle(design, config.link, omega, fit_config, &result.warnings));

    const int points = config.wald_points > 0 ? config.wald_points : basis.size();
    result.wald = wald_grid_test(*fit, design.layout.test_block()->name(), basis, points);
    result.fit = std::move(fit);
    result.reject = result.wald.p_value < config.alpha;
    return result;
}

DesignMatrix local_independence_design(const MarkedEventSequence& seq, int j, int k,
                                       std::vector<int> conditioning, const LITestConfig& config)
{
    const PreparedHypothesis prepared = prepare(seq, j, k, std::move(conditioning), config);
    if (seq.count(j) == 0 || seq.count(k) == 0)
        throw Error(Errc::InvalidArgument, "tested or target mark has no events");
    return make_design(seq, prepared, config, nullptr, nullptr);
}

} // namespace locind
