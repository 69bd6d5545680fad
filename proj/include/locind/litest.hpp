#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "locind/bspline.hpp"
#include "locind/estimation.hpp"
#include "locind/events.hpp"
#include "locind/features.hpp"
#include "locind/link.hpp"
#include "locind/wald.hpp"

namespace locind {

struct LITestConfig {
    int order = 2;
    double alpha = 0.05;
    double support = 5.0;
    int num_basis = 6;
    int degree = 3;
    double grid_step = 0.1;
    // Wald grid size; 0 means num_basis.
    int wald_points = 0;
    Link link{LinkKind::PiecewiseLogLinear};
    FitConfig fit;
    // Condition on the target's own history (C is augmented with k).
    bool include_target_history = true;
    // When non-empty, kappa is chosen from this grid by held-out
    // log-likelihood instead of using fit.kappa.
    std::vector<double> kappa_grid;
    double kappa_holdout_fraction = 0.2;

    SplineBasis basis() const { return SplineBasis(support, num_basis, degree); }
    void validate() const;
};

struct Hypothesis {
    int j = 0;
    int k = 0;
    // Conditioning set as requested, before adding k.
    std::vector<int> conditioning;
    int order = 2;
};

struct LITestResult {
    Hypothesis hypothesis;
    WaldResult wald;
    std::shared_ptr<const FittedIntensityModel> fit;
    bool reject = false;
    // j or k has no events; p-value set to 1 without fitting.
    bool mark_missing = false;
    Warnings warnings;
    std::optional<KappaSelection> kappa_selection;

    double p_value() const { return wald.p_value; }
};

/*!
 * Test j -/-> k | C.
 *
 * Nuisance blocks model the C (plus k) history at the configured order; j
 * always enters through a first-order block, whose fitted filter is tested
 * with the grid Wald test. Pass a FeatureCache built on the same sequence and
 * basis to reuse feature sweeps across hypotheses.
 */
LITestResult test_local_independence(const MarkedEventSequence& seq, int j, int k,
                                     std::vector<int> conditioning, const LITestConfig& config,
                                     const FeatureCache* cache = nullptr);

// The design the test above fits, for inspection and export. Same argument
// checks; throws InvalidArgument when j or k has no events.
DesignMatrix local_independence_design(const MarkedEventSequence& seq, int j, int k,
                                       std::vector<int> conditioning, const LITestConfig& config);

} // namespace locind
