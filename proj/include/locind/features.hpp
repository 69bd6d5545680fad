#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "locind/bspline.hpp"
#include "locind/error.hpp"
#include "locind/events.hpp"

namespace locind {

// Entry i: sum over events tau of `mark` with tau < t of b_i(t - tau).
Eigen::VectorXd first_order_features(const MarkedEventSequence& seq, int mark,
                                     const SplineBasis& basis, double t);

// First-order features at many ascending evaluation times in a single sweep
// over the sorted event times (rows follow eval_times).
Eigen::MatrixXd first_order_feature_matrix(std::span<const double> event_times,
                                           const SplineBasis& basis,
                                           std::span<const double> eval_times);

/*!
 * Index set of a second-order (tensor) block for a mark pair.
 *
 * Cross pairs use all (i1, i2). Same-mark pairs are symmetric under swapping
 * the two integrals, so only i1 <= i2 is parameterized and the off-diagonal
 * feature is doubled.
 */
class TensorBasis {
  public:
    TensorBasis(int num_basis, bool same_mark);

    int size() const { return static_cast<int>(pairs_.size()); }
    bool same_mark() const { return same_mark_; }
    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    // Multiplicity of pair p in the feature (2 for i1 < i2 on the same mark).
    double multiplicity(int p) const;

  private:
    bool same_mark_;
    std::vector<std::pair<int, int>> pairs_;
};

// Second-order features for marks (mark1, mark2) at t, through the product
// factorization F^{mark1}_{i1}(t) * F^{mark2}_{i2}(t).
Eigen::VectorXd second_order_features(const MarkedEventSequence& seq, int mark1, int mark2,
                                      const SplineBasis& basis, double t);

enum class BlockKind { Intercept, FirstOrder, SecondOrder, Test };

struct FeatureBlock {
    BlockKind kind = BlockKind::Intercept;
    int mark1 = -1;
    int mark2 = -1;
    int offset = 0;
    int size = 0;

    // "intercept", "first[c]", "second[a,b]" or "test[j]".
    std::string name() const;
};

class DesignLayout {
  public:
    DesignLayout() = default;
    DesignLayout(int num_basis, const std::vector<int>& conditioning, int order,
                 std::optional<int> test_mark);

    int columns() const { return columns_; }
    int num_basis() const { return num_basis_; }
    const std::vector<FeatureBlock>& blocks() const { return blocks_; }
    // Throws InvalidArgument when no block has this name.
    const FeatureBlock& find(const std::string& name) const;
    const FeatureBlock* test_block() const;

  private:
    void push(BlockKind kind, int m1, int m2, int size);

    int num_basis_ = 0;
    int columns_ = 0;
    std::vector<FeatureBlock> blocks_;
};

struct DesignRequest {
    int target = 0;
    // Full conditioning set (the caller adds the target when its own history
    // is to be included).
    std::vector<int> conditioning;
    int order = 1;
    std::optional<int> test_mark;
};

/*!
 * Quadrature and event rows of the linear predictor features.
 *
 * The quadrature grid is t_g = start + g * step on the window with left-point
 * weights (the last weight is shortened so the weights sum to the window
 * length). Event rows are the features at each target event, using only
 * strictly earlier events.
 */
struct DesignMatrix {
    DesignLayout layout;
    int target = 0;
    Eigen::VectorXd grid;
    Eigen::VectorXd weights;
    Eigen::MatrixXd quadrature;
    Eigen::VectorXd event_times;
    Eigen::MatrixXd events;
};

// Precomputed first-order features of a data set on the quadrature grid and at
// the events of each target. Immutable once built; safe to share.
class FeatureCache {
  public:
    // marks: the marks to precompute (all when empty). Throws GridTooCoarse
    // if grid_step > support / 4.
    FeatureCache(const MarkedEventSequence& seq, const SplineBasis& basis, double grid_step,
                 std::vector<int> marks = {});

    const MarkedEventSequence& sequence() const { return *seq_; }
    const SplineBasis& basis() const { return basis_; }
    double grid_step() const { return grid_step_; }
    const Eigen::VectorXd& grid() const { return grid_; }
    const Eigen::VectorXd& weights() const { return weights_; }

    bool has_mark(int mark) const;
    const Eigen::MatrixXd& grid_features(int mark) const;
    const Eigen::MatrixXd& event_features(int mark, int target) const;

  private:
    std::size_t slot(int mark) const;

    const MarkedEventSequence* seq_;
    SplineBasis basis_;
    double grid_step_;
    std::vector<int> slot_of_mark_;
    Eigen::VectorXd grid_;
    Eigen::VectorXd weights_;
    std::vector<Eigen::MatrixXd> grid_features_;
    std::vector<std::vector<Eigen::MatrixXd>> event_features_;
};

DesignMatrix build_design(const FeatureCache& cache, const DesignRequest& request,
                          Warnings* warnings = nullptr);

DesignMatrix build_design(const MarkedEventSequence& seq, const DesignRequest& request,
                          const SplineBasis& basis, double grid_step,
                          Warnings* warnings = nullptr);

} // namespace locind
