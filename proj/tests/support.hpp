#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "locind/bspline.hpp"
#include "locind/events.hpp"
#include "locind/features.hpp"
#include "locind/model.hpp"
#include "locind/random.hpp"

namespace locind::oracle {

// Random small sequence with distinct times on [0, T).
inline MarkedEventSequence random_sequence(Rng& rng, int dim, int events, double horizon)
{
    std::vector<double> times;
    std::vector<int> marks;
    for (int i = 0; i < events; ++i) {
        times.push_back(horizon * rng.uniform());
        marks.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(dim)));
    }
    return validate_events(times, marks, Window{0.0, horizon}, dim);
}

inline MarkedEventSequence poisson_sequence(Rng& rng, const std::vector<double>& rates,
                                            double horizon)
{
    std::vector<double> times;
    std::vector<int> marks;
    for (std::size_t m = 0; m < rates.size(); ++m) {
        double t = rng.exponential(rates[m]);
        while (t < horizon) {
            times.push_back(t);
            marks.push_back(static_cast<int>(m));
            t += rng.exponential(rates[m]);
        }
    }
    return validate_events(times, marks, Window{0.0, horizon}, static_cast<int>(rates.size()));
}

// Composite Simpson rule with n (even) panels.
template <typename F>
double simpson(F&& f, double a, double b, int n)
{
    if (n % 2)
        ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// Textbook Cox-de Boor recursion on the library's knot vector, with the last
// nonempty span closed on the left only (support is [0, S)).
inline double cox_de_boor(const std::vector<double>& t, int i, int p, double u)
{
    if (p == 0)
        return (t[i] <= u && u < t[i + 1]) ? 1.0 : 0.0;
    double out = 0.0;
    if (t[i + p] > t[i])
        out += (u - t[i]) / (t[i + p] - t[i]) * cox_de_boor(t, i, p - 1, u);
    if (t[i + p + 1] > t[i + 1])
        out += (t[i + p + 1] - u) / (t[i + p + 1] - t[i + 1]) * cox_de_boor(t, i + 1, p - 1, u);
    return out;
}

inline double oracle_value(const SplineBasis& b, int i, double u)
{
    if (u < 0 || u >= b.support())
        return 0.0;
    return cox_de_boor(b.knots(), i, b.degree(), u);
}

inline Eigen::VectorXd brute_first(const MarkedEventSequence& seq, int m, const SplineBasis& b, double t)
{
    Eigen::VectorXd f = Eigen::VectorXd::Zero(b.size());
    for (double tau : seq.times_of(m))
        if (tau < t)
            for (int i = 0; i < b.size(); ++i)
                f(i) += oracle_value(b, i, t - tau);
    return f;
}

// Double sum over ordered event pairs, including the diagonal for m1 == m2.
inline Eigen::VectorXd brute_second(const MarkedEventSequence& seq, int m1, int m2, const SplineBasis& b,
                             double t)
{
    TensorBasis tb(b.size(), m1 == m2);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(tb.size());
    for (double t1 : seq.times_of(m1))
        for (double t2 : seq.times_of(m2)) {
            if (!(t1 < t && t2 < t))
                continue;
            for (int p = 0; p < tb.size(); ++p) {
                auto [i1, i2] = tb.pairs()[static_cast<std::size_t>(p)];
                double v = oracle_value(b, i1, t - t1) * oracle_value(b, i2, t - t2);
                if (m1 == m2 && i1 != i2)
                    v += oracle_value(b, i2, t - t1) * oracle_value(b, i1, t - t2);
                f(p) += v;
            }
        }
    return f;
}


// Compensator gaps of mark k by Simpson quadrature of true_intensity between
// consecutive events of any mark. Independent of the library's sweep.
inline std::vector<double> quadrature_gaps(const IntensityModelSpec& spec, const MarkedEventSequence& seq,
                                    int k)
{
    std::vector<double> cuts{seq.window().start};
    for (double t : seq.times())
        cuts.push_back(t);
    auto marks = seq.marks();
    std::vector<double> gaps;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        // Evaluate just inside the interval so the right-limit at a is used.
        auto f = [&](double t) {
            return true_intensity(spec, seq, k, std::clamp(t, a + 1e-12, b));
        };
        acc += oracle::simpson(f, a, b, 64);
        if (marks[i] == k) {
            gaps.push_back(acc);
            acc = 0.0;
        }
    }
    return gaps;
}

inline double ks_exp1(std::vector<double> gaps)
{
    std::sort(gaps.begin(), gaps.end());
    const double n = static_cast<double>(gaps.size());
    double d = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double f = 1.0 - std::exp(-gaps[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

} // namespace locind::oracle
