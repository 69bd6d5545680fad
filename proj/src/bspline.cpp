#include "locind/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "locind/error.hpp"

namespace locind {

SplineBasis::SplineBasis(double support, int num_basis, int degree)
    : support_(support), num_basis_(num_basis), degree_(degree)
{
    if (!(support > 0) || !std::isfinite(support) || degree < 0 || degree > 30
        || num_basis < degree + 1) {
        std::ostringstream os;
        os << "need support > 0 and num_basis >= degree + 1 (support=" << support
           << ", num_basis=" << num_basis << ", degree=" << degree << ")";
        throw Error(Errc::InvalidBasisSpec, os.str());
    }
    const int spans = num_basis - degree;
    knots_.reserve(static_cast<std::size_t>(num_basis + degree + 1));
    for (int i = 0; i < degree; ++i)
        knots_.push_back(0.0);
    for (int m = 0; m <= spans; ++m)
        knots_.push_back(m == spans ? support : support * m / spans);
    for (int i = 0; i < degree; ++i)
        knots_.push_back(support);
}

int SplineBasis::find_span(double u) const
{
    // Largest s in [degree, num_basis - 1] with knots[s] <= u.
    const auto first = knots_.begin() + degree_;
    const auto last = knots_.begin() + num_basis_;
    auto it = std::upper_bound(first, last, u);
    return static_cast<int>(it - knots_.begin()) - 1;
}

int SplineBasis::evaluate_nonzero(double u, std::span<double> out) const
{
    if (!(u >= 0.0) || !(u < support_))
        return -1;
    const int s = find_span(u);
    const int p = degree_;
    // Cox-de Boor triangle, as in the classic BasisFuns routine.
    double left[32];
    double right[32];
    out[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - knots_[static_cast<std::size_t>(s + 1 - j)];
        right[j] = knots_[static_cast<std::size_t>(s + j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = out[static_cast<std::size_t>(r)] / (right[r + 1] + left[j - r]);
            out[static_cast<std::size_t>(r)] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[static_cast<std::size_t>(j)] = saved;
    }
    return s - p;
}

void SplineBasis::evaluate(double u, std::span<double> out) const
{
    std::fill(out.begin(), out.end(), 0.0);
    double local[32];
    const int first = evaluate_nonzero(u, std::span<double>(local, static_cast<std::size_t>(degree_ + 1)));
    if (first < 0)
        return;
    for (int r = 0; r <= degree_; ++r)
        out[static_cast<std::size_t>(first + r)] = local[r];
}

Eigen::VectorXd SplineBasis::evaluate(double u) const
{
    Eigen::VectorXd v(num_basis_);
    evaluate(u, std::span<double>(v.data(), static_cast<std::size_t>(num_basis_)));
    return v;
}

void SplineBasis::basis_derivatives(int span, double u, int order, Eigen::MatrixXd& ders) const
{
    // Piegl & Tiller, DersBasisFuns.
    const int p = degree_;
    const int n = std::min(order, p);
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(static_cast<std::size_t>(p + 1)), right(static_cast<std::size_t>(p + 1));
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[static_cast<std::size_t>(j)] = u - knots_[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = knots_[static_cast<std::size_t>(span + j)] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        ndu(j, j) = saved;
    }

    ders = Eigen::MatrixXd::Zero(order + 1, p + 1);
    for (int j = 0; j <= p; ++j)
        ders(0, j) = ndu(j, p);

    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0;
        int s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= n; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = p - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            ders(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int k = 1; k <= n; ++k) {
        ders.row(k) *= factor;
        factor *= (p - k);
    }
}

double SplineBasis::derivative(int i, double u, int order) const
{
    if (i < 0 || i >= num_basis_)
        throw Error(Errc::InvalidArgument, "basis index out of range");
    if (order < 0)
        throw Error(Errc::InvalidArgument, "derivative order must be nonnegative");
    if (!(u >= 0.0) || !(u < support_) || order > degree_)
        return 0.0;
    const int s = find_span(u);
    const int first = s - degree_;
    if (i < first || i > s)
        return 0.0;
    Eigen::MatrixXd ders;
    basis_derivatives(s, u, order, ders);
    return ders(order, i - first);
}

Eigen::MatrixXd SplineBasis::gram(int order) const
{
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(num_basis_, num_basis_);
    if (order > degree_)
        return g;
    std::vector<double> nodes, weights;
    gauss_legendre(degree_ + 1, nodes, weights);
    Eigen::MatrixXd ders;
    for (int s = degree_; s < num_basis_; ++s) {
        const double a = knots_[static_cast<std::size_t>(s)];
        const double b = knots_[static_cast<std::size_t>(s + 1)];
        if (!(b > a))
            continue;
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            basis_derivatives(s, mid + half * nodes[q], order, ders);
            const Eigen::VectorXd v = ders.row(order).transpose();
            g.block(s - degree_, s - degree_, degree_ + 1, degree_ + 1) += weights[q] * half * v * v.transpose();
        }
    }
    return g;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    if (n < 1)
        throw Error(Errc::InvalidArgument, "Gauss-Legendre rule needs at least one node");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (x * p0 - p1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

} // namespace locind
