#include "locind/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace locind {

Eigen::VectorXd first_order_features(const MarkedEventSequence& seq, int mark,
                                     const SplineBasis& basis, double t)
{
    const double eval[1] = {t};
    Eigen::MatrixXd row = first_order_feature_matrix(seq.times_of(mark), basis, eval);
    return row.row(0).transpose();
}

Eigen::MatrixXd first_order_feature_matrix(std::span<const double> event_times,
                                           const SplineBasis& basis,
                                           std::span<const double> eval_times)
{
    const int nb = basis.size();
    const int p = basis.degree();
    const double support = basis.support();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(eval_times.size()), nb);
    double local[32];
    const std::span<double> vals(local, static_cast<std::size_t>(p + 1));

    std::size_t lo = 0;
    std::size_t hi = 0;
    for (std::size_t r = 0; r < eval_times.size(); ++r) {
        const double t = eval_times[r];
        while (hi < event_times.size() && event_times[hi] < t)
            ++hi;
        while (lo < hi && t - event_times[lo] >= support)
            ++lo;
        for (std::size_t e = lo; e < hi; ++e) {
            const int first = basis.evaluate_nonzero(t - event_times[e], vals);
            if (first < 0)
                continue;
            for (int q = 0; q <= p; ++q)
                out(static_cast<Eigen::Index>(r), first + q) += local[q];
        }
    }
    return out;
}

TensorBasis::TensorBasis(int num_basis, bool same_mark) : same_mark_(same_mark)
{
    for (int a = 0; a < num_basis; ++a)
        for (int b = same_mark ? a : 0; b < num_basis; ++b)
            pairs_.emplace_back(a, b);
}

double TensorBasis::multiplicity(int p) const
{
    const auto& [a, b] = pairs_.at(static_cast<std::size_t>(p));
    return (same_mark_ && a != b) ? 2.0 : 1.0;
}

namespace {

// Fill the columns of a second-order block from the first-order feature
// matrices of its two marks.
template <typename Out>
void tensor_columns(const Eigen::MatrixXd& f1, const Eigen::MatrixXd& f2, const TensorBasis& tb,
                    Out&& out)
{
    const auto& pairs = tb.pairs();
    for (int c = 0; c < tb.size(); ++c) {
        const auto [a, b] = pairs[static_cast<std::size_t>(c)];
        out.col(c) = tb.multiplicity(c) * f1.col(a).cwiseProduct(f2.col(b));
    }
}

} // namespace

Eigen::VectorXd second_order_features(const MarkedEventSequence& seq, int mark1, int mark2,
                                      const SplineBasis& basis, double t)
{
    const Eigen::RowVectorXd f1 = first_order_features(seq, mark1, basis, t).transpose();
    const Eigen::RowVectorXd f2 =
        mark1 == mark2 ? f1 : Eigen::RowVectorXd(first_order_features(seq, mark2, basis, t).transpose());
    TensorBasis tb(basis.size(), mark1 == mark2);
    Eigen::MatrixXd row(1, tb.size());
    tensor_columns(Eigen::MatrixXd(f1), Eigen::MatrixXd(f2), tb, row);
    return row.row(0).transpose();
}

std::string FeatureBlock::name() const
{
    std::ostringstream os;
    switch (kind) {
    case BlockKind::Intercept: return "intercept";
    case BlockKind::FirstOrder: os << "first[" << mark1 << "]"; break;
    case BlockKind::SecondOrder: os << "second[" << mark1 << "," << mark2 << "]"; break;
    case BlockKind::Test: os << "test[" << mark1 << "]"; break;
    }
    return os.str();
}

DesignLayout::DesignLayout(int num_basis, const std::vector<int>& conditioning, int order,
                           std::optional<int> test_mark)
    : num_basis_(num_basis)
{
    if (order != 1 && order != 2)
        throw Error(Errc::InvalidArgument, "expansion order must be 1 or 2");
    std::vector<int> cond = conditioning;
    std::sort(cond.begin(), cond.end());
    cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
    if (test_mark && std::binary_search(cond.begin(), cond.end(), *test_mark))
        throw Error(Errc::InvalidArgument, "test mark must not be in the conditioning set");

    push(BlockKind::Intercept, -1, -1, 1);
    for (int m : cond)
        push(BlockKind::FirstOrder, m, -1, num_basis);
    if (order == 2) {
        for (std::size_t a = 0; a < cond.size(); ++a)
            for (std::size_t b = a; b < cond.size(); ++b)
                push(BlockKind::SecondOrder, cond[a], cond[b],
                     TensorBasis(num_basis, a == b).size());
    }
    if (test_mark)
        push(BlockKind::Test, *test_mark, -1, num_basis);
}

void DesignLayout::push(BlockKind kind, int m1, int m2, int size)
{
    blocks_.push_back(FeatureBlock{kind, m1, m2, columns_, size});
    columns_ += size;
}

const FeatureBlock& DesignLayout::find(const std::string& name) const
{
    for (const auto& b : blocks_)
        if (b.name() == name)
            return b;
    throw Error(Errc::InvalidArgument, "design has no block named '" + name + "'");
}

const FeatureBlock* DesignLayout::test_block() const
{
    for (const auto& b : blocks_)
        if (b.kind == BlockKind::Test)
            return &b;
    return nullptr;
}

FeatureCache::FeatureCache(const MarkedEventSequence& seq, const SplineBasis& basis,
                           double grid_step, std::vector<int> marks)
    : seq_(&seq), basis_(basis), grid_step_(grid_step),
      slot_of_mark_(static_cast<std::size_t>(seq.dim()), -1)
{
    if (!(grid_step > 0) || !std::isfinite(grid_step))
        throw Error(Errc::InvalidArgument, "grid step must be positive");
    if (grid_step > basis.support() / 4) {
        std::ostringstream os;
        os << "grid step " << grid_step << " exceeds support/4 = " << basis.support() / 4;
        throw Error(Errc::GridTooCoarse, os.str());
    }
    if (marks.empty())
        for (int m = 0; m < seq.dim(); ++m)
            marks.push_back(m);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    for (std::size_t s = 0; s < marks.size(); ++s) {
        if (marks[s] < 0 || marks[s] >= seq.dim())
            throw Error(Errc::MarkOutOfRange, "mark " + std::to_string(marks[s]) + " out of range");
        slot_of_mark_[static_cast<std::size_t>(marks[s])] = static_cast<int>(s);
    }

    const Window w = seq.window();
    const double length = w.length();
    const auto n = static_cast<Eigen::Index>(std::max(1.0, std::ceil(length / grid_step - 1e-9)));
    grid_.resize(n);
    weights_.resize(n);
    for (Eigen::Index g = 0; g < n; ++g) {
        grid_(g) = w.start + static_cast<double>(g) * grid_step;
        weights_(g) = grid_step;
    }
    weights_(n - 1) = length - static_cast<double>(n - 1) * grid_step;

    const std::span<const double> grid_span(grid_.data(), static_cast<std::size_t>(n));
    for (int m : marks)
        grid_features_.push_back(first_order_feature_matrix(seq.times_of(m), basis, grid_span));
    event_features_.resize(marks.size());
    for (std::size_t s = 0; s < marks.size(); ++s)
        for (int target : marks)
            event_features_[s].push_back(
                first_order_feature_matrix(seq.times_of(marks[s]), basis, seq.times_of(target)));
}

bool FeatureCache::has_mark(int mark) const
{
    return mark >= 0 && mark < static_cast<int>(slot_of_mark_.size())
           && slot_of_mark_[static_cast<std::size_t>(mark)] >= 0;
}

std::size_t FeatureCache::slot(int mark) const
{
    if (!has_mark(mark))
        throw Error(Errc::InvalidArgument, "mark " + std::to_string(mark) + " not in feature cache");
    return static_cast<std::size_t>(slot_of_mark_[static_cast<std::size_t>(mark)]);
}

const Eigen::MatrixXd& FeatureCache::grid_features(int mark) const
{
    return grid_features_[slot(mark)];
}

const Eigen::MatrixXd& FeatureCache::event_features(int mark, int target) const
{
    return event_features_[slot(mark)][slot(target)];
}

DesignMatrix build_design(const FeatureCache& cache, const DesignRequest& request,
                          Warnings* warnings)
{
    const MarkedEventSequence& seq = cache.sequence();
    const int nb = cache.basis().size();
    DesignMatrix dm;
    dm.layout = DesignLayout(nb, request.conditioning, request.order, request.test_mark);
    dm.target = request.target;
    dm.grid = cache.grid();
    dm.weights = cache.weights();

    const auto target_times = seq.times_of(request.target);
    if (target_times.empty() && warnings)
        warnings->push_back("EmptyTargetEvents: target mark " + std::to_string(request.target)
                            + " has no events");
    dm.event_times = Eigen::Map<const Eigen::VectorXd>(target_times.data(),
                                                       static_cast<Eigen::Index>(target_times.size()));

    const Eigen::Index ng = dm.grid.size();
    const Eigen::Index ne = dm.event_times.size();
    const int p = dm.layout.columns();
    dm.quadrature.resize(ng, p);
    dm.events.resize(ne, p);

    for (const auto& block : dm.layout.blocks()) {
        auto q = dm.quadrature.middleCols(block.offset, block.size);
        auto e = dm.events.middleCols(block.offset, block.size);
        switch (block.kind) {
        case BlockKind::Intercept:
            q.setOnes();
            e.setOnes();
            break;
        case BlockKind::FirstOrder:
        case BlockKind::Test:
            q = cache.grid_features(block.mark1);
            e = cache.event_features(block.mark1, request.target);
            break;
        case BlockKind::SecondOrder: {
            const TensorBasis tb(nb, block.mark1 == block.mark2);
            tensor_columns(cache.grid_features(block.mark1), cache.grid_features(block.mark2), tb, q);
            tensor_columns(cache.event_features(block.mark1, request.target),
                           cache.event_features(block.mark2, request.target), tb, e);
            break;
        }
        }
    }
    return dm;
}

DesignMatrix build_design(const MarkedEventSequence& seq, const DesignRequest& request,
                          const SplineBasis& basis, double grid_step, Warnings* warnings)
{
    std::vector<int> marks = request.conditioning;
    marks.push_back(request.target);
    if (request.test_mark)
        marks.push_back(*request.test_mark);
    const FeatureCache cache(seq, basis, grid_step, std::move(marks));
    return build_design(cache, request, warnings);
}

} // namespace locind
