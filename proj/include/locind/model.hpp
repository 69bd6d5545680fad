#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "locind/events.hpp"
#include "locind/graph.hpp"
#include "locind/link.hpp"

namespace locind {

// g(s) = alpha * beta * exp(-beta s) for s >= 0. The integral over [0, inf)
// is alpha; alpha may be negative (inhibition).
class ExponentialKernel {
  public:
    ExponentialKernel(double alpha, double beta);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    double operator()(double lag) const;
    double integral() const { return alpha_; }

    bool operator==(const ExponentialKernel&) const = default;

  private:
    double alpha_;
    double beta_;
};

/*!
 * Ground-truth (nonlinear) Hawkes model:
 *
 *   eta(lambda^k_t) = baseline_k + sum_j sum_{tau^j_i < t} g^{jk}(t - tau^j_i)
 *
 * Kernel (j, k) is the effect of mark j on mark k. An absent kernel means no
 * edge j -> k; it is not the same as a kernel with alpha = 0.
 */
class IntensityModelSpec {
  public:
    IntensityModelSpec() = default;
    IntensityModelSpec(int dim, std::vector<double> baselines, Link link = Link{});

    int dim() const { return dim_; }
    const std::vector<double>& baselines() const { return baselines_; }
    double baseline(int k) const { return baselines_.at(static_cast<std::size_t>(k)); }
    const Link& link() const { return link_; }

    const std::optional<ExponentialKernel>& kernel(int from, int to) const;
    void set_kernel(int from, int to, ExponentialKernel kernel);
    void clear_kernel(int from, int to);

    void set_baseline(int k, double value);
    void set_link(Link link) { link_ = link; }

    // Edge j -> k iff kernel (j, k) is present.
    DirectedGraph graph() const;

    bool operator==(const IntensityModelSpec&) const = default;

  private:
    std::size_t index(int from, int to) const;

    int dim_ = 0;
    std::vector<double> baselines_;
    std::vector<std::optional<ExponentialKernel>> kernels_;
    Link link_;
};

// Entry (j, k) is the integrated kernel mass alpha_{jk}, 0 where absent.
Eigen::MatrixXd integrated_kernel_matrix(const IntensityModelSpec& spec);

// Largest eigenvalue modulus. Throws NoConvergence if the eigensolver fails.
double spectral_radius(const Eigen::MatrixXd& matrix);

// Linear predictor eta(lambda^k_t) using events strictly before t.
double linear_predictor(const IntensityModelSpec& spec, const MarkedEventSequence& seq, int k,
                        double t);

// lambda^k_t = eta^{-1}(linear predictor), clamped at 0 for the identity link.
double true_intensity(const IntensityModelSpec& spec, const MarkedEventSequence& seq, int k,
                      double t);

} // namespace locind

namespace locind {

// Compensator increments of mark k between its successive events, starting
// from the window start: Lambda(t_1) - Lambda(start), Lambda(t_2) -
// Lambda(t_1), ... Computed by piecewise Gauss-Legendre quadrature of the
// true intensity, split where the predictor crosses a link knot. Under the
// model these are iid Exp(1) when the sequence starts empty.
std::vector<double> compensator_increments(const IntensityModelSpec& spec,
                                           const MarkedEventSequence& seq, int k);

} // namespace locind
