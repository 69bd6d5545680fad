#include "locind/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "locind/bspline.hpp"
#include "locind/error.hpp"

namespace locind {

ExponentialKernel::ExponentialKernel(double alpha, double beta) : alpha_(alpha), beta_(beta)
{
    if (!std::isfinite(alpha) || !std::isfinite(beta))
        throw Error(Errc::NonFiniteValue, "kernel parameters must be finite");
    if (!(beta > 0))
        throw Error(Errc::InvalidArgument, "kernel decay must be positive");
}

double ExponentialKernel::operator()(double lag) const
{
    if (lag < 0)
        return 0.0;
    return alpha_ * beta_ * std::exp(-beta_ * lag);
}

IntensityModelSpec::IntensityModelSpec(int dim, std::vector<double> baselines, Link link)
    : dim_(dim), baselines_(std::move(baselines)), link_(link)
{
    if (dim < 1)
        throw Error(Errc::InvalidArgument, "model dimension must be at least 1");
    if (static_cast<int>(baselines_.size()) != dim)
        throw Error(Errc::DimensionMismatch, "expected one baseline per mark");
    for (double b : baselines_)
        if (!std::isfinite(b) || b < 0)
            throw Error(Errc::InvalidArgument, "baselines must be finite and nonnegative");
    kernels_.resize(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
}

std::size_t IntensityModelSpec::index(int from, int to) const
{
    if (from < 0 || from >= dim_ || to < 0 || to >= dim_)
        throw Error(Errc::MarkOutOfRange, "kernel index out of range");
    return static_cast<std::size_t>(from * dim_ + to);
}

const std::optional<ExponentialKernel>& IntensityModelSpec::kernel(int from, int to) const
{
    return kernels_[index(from, to)];
}

void IntensityModelSpec::set_kernel(int from, int to, ExponentialKernel kernel)
{
    kernels_[index(from, to)] = kernel;
}

void IntensityModelSpec::clear_kernel(int from, int to)
{
    kernels_[index(from, to)].reset();
}

void IntensityModelSpec::set_baseline(int k, double value)
{
    if (!std::isfinite(value) || value < 0)
        throw Error(Errc::InvalidArgument, "baselines must be finite and nonnegative");
    baselines_.at(static_cast<std::size_t>(k)) = value;
}

DirectedGraph IntensityModelSpec::graph() const
{
    DirectedGraph g(dim_);
    for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
            if (kernel(j, k))
                g.add_edge(j, k);
    return g;
}

Eigen::MatrixXd integrated_kernel_matrix(const IntensityModelSpec& spec)
{
    const int d = spec.dim();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            if (const auto& kern = spec.kernel(j, k))
                g(j, k) = kern->integral();
    return g;
}

double spectral_radius(const Eigen::MatrixXd& matrix)
{
    if (matrix.rows() != matrix.cols())
        throw Error(Errc::DimensionMismatch, "spectral radius needs a square matrix");
    if (matrix.size() == 0)
        return 0.0;
    if (!matrix.allFinite())
        throw Error(Errc::NonFiniteValue, "matrix has non-finite entries");
    // If the off-diagonal pattern has no cycle the matrix is triangular up to
    // a permutation and its eigenvalues are the diagonal entries. This is the
    // common case (acyclic graphs with self-loops) and avoids the loss of
    // accuracy of iterative solvers on repeated eigenvalues.
    const Eigen::Index n = matrix.rows();
    std::vector<int> indegree(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && matrix(i, j) != 0.0)
                ++indegree[static_cast<std::size_t>(j)];
    std::vector<Eigen::Index> ready;
    for (Eigen::Index j = 0; j < n; ++j)
        if (indegree[static_cast<std::size_t>(j)] == 0)
            ready.push_back(j);
    Eigen::Index ordered = 0;
    while (!ready.empty()) {
        const Eigen::Index i = ready.back();
        ready.pop_back();
        ++ordered;
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && matrix(i, j) != 0.0 && --indegree[static_cast<std::size_t>(j)] == 0)
                ready.push_back(j);
    }
    if (ordered == n)
        return matrix.diagonal().cwiseAbs().maxCoeff();

    Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, false);
    if (solver.info() != Eigen::Success)
        throw Error(Errc::NoConvergence, "eigenvalue iteration did not converge");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double linear_predictor(const IntensityModelSpec& spec, const MarkedEventSequence& seq, int k,
                        double t)
{
    if (seq.dim() != spec.dim())
        throw Error(Errc::DimensionMismatch, "sequence and model dimensions differ");
    double eta = spec.baseline(k);
    for (int j = 0; j < spec.dim(); ++j) {
        const auto& kern = spec.kernel(j, k);
        if (!kern)
            continue;
        auto times = seq.times_of(j);
        auto end = std::lower_bound(times.begin(), times.end(), t);
        for (auto it = times.begin(); it != end; ++it)
            eta += (*kern)(t - *it);
    }
    return eta;
}

double true_intensity(const IntensityModelSpec& spec, const MarkedEventSequence& seq, int k,
                      double t)
{
    return std::max(0.0, spec.link().inverse(linear_predictor(spec, seq, k, t)));
}

namespace {

struct PredictorPiece {
    double base;
    std::vector<double> amplitude; // at the piece start
    std::vector<double> decay;

    double at(double dt) const
    {
        double y = base;
        for (std::size_t i = 0; i < amplitude.size(); ++i)
            y += amplitude[i] * std::exp(-decay[i] * dt);
        return y;
    }
};

} // namespace

std::vector<double> compensator_increments(const IntensityModelSpec& spec,
                                           const MarkedEventSequence& seq, int k)
{
    if (seq.dim() != spec.dim())
        throw Error(Errc::DimensionMismatch, "sequence and model dimensions differ");
    if (k < 0 || k >= spec.dim())
        throw Error(Errc::MarkOutOfRange, "mark out of range");

    std::vector<int> sources;
    PredictorPiece piece{spec.baseline(k), {}, {}};
    double max_decay = 0.0;
    for (int j = 0; j < spec.dim(); ++j)
        if (const auto& kern = spec.kernel(j, k)) {
            sources.push_back(j);
            piece.amplitude.push_back(0.0);
            piece.decay.push_back(kern->beta());
            max_decay = std::max(max_decay, kern->beta());
        }

    const Link link = spec.link();
    auto intensity = [&](double y) { return std::max(0.0, link.inverse(y)); };
    std::optional<double> knot;
    if (link.kind() == LinkKind::PiecewiseLogLinear)
        knot = 1.0;
    else if (link.kind() == LinkKind::Identity)
        knot = 0.0;

    std::vector<double> nodes, weights;
    gauss_legendre(10, nodes, weights);
    auto smooth_integral = [&](double u0, double u1) {
        const double half = 0.5 * (u1 - u0);
        const double mid = 0.5 * (u1 + u0);
        double sum = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q)
            sum += weights[q] * intensity(piece.at(mid + half * nodes[q]));
        return sum * half;
    };
    auto panel_integral = [&](double u0, double u1) {
        if (knot) {
            const double s0 = piece.at(u0) - *knot;
            const double s1 = piece.at(u1) - *knot;
            if ((s0 < 0) != (s1 < 0)) {
                double lo = u0, hi = u1;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
                    const double m = 0.5 * (lo + hi);
                    if (((piece.at(m) - *knot) < 0) == (s0 < 0))
                        lo = m;
                    else
                        hi = m;
                }
                return smooth_integral(u0, lo) + smooth_integral(lo, u1);
            }
        }
        return smooth_integral(u0, u1);
    };
    const double max_panel = max_decay > 0 ? 0.25 / max_decay : std::numeric_limits<double>::infinity();
    auto interval_integral = [&](double length) {
        if (length <= 0)
            return 0.0;
        const auto panels = static_cast<std::size_t>(std::ceil(length / max_panel));
        const std::size_t n = std::max<std::size_t>(1, std::isfinite(max_panel) ? panels : 1);
        const double h = length / static_cast<double>(n);
        double sum = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            sum += panel_integral(h * static_cast<double>(p), p + 1 == n ? length : h * static_cast<double>(p + 1));
        return sum;
    };

    std::vector<double> increments;
    auto times = seq.times();
    auto marks = seq.marks();
    double last = seq.window().start;
    double accumulated = 0.0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const double t = times[i];
        accumulated += interval_integral(t - last);
        for (std::size_t s = 0; s < sources.size(); ++s)
            piece.amplitude[s] *= std::exp(-piece.decay[s] * (t - last));
        last = t;
        if (marks[i] == k) {
            increments.push_back(accumulated);
            accumulated = 0.0;
        }
        for (std::size_t s = 0; s < sources.size(); ++s)
            if (sources[s] == marks[i])
                piece.amplitude[s] += spec.kernel(marks[i], k)->alpha() * piece.decay[s];
    }
    return increments;
}

} // namespace locind
