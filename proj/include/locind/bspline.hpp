#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace locind {

/*!
 * Clamped B-spline basis on the lag support [0, S) with uniform interior knots.
 *
 * All functions vanish for u < 0 and u >= S. On [0, S) they are nonnegative
 * and sum to one.
 */
class SplineBasis {
  public:
    // Throws InvalidBasisSpec unless num_basis >= degree + 1, degree >= 0 and
    // support > 0.
    SplineBasis(double support, int num_basis, int degree = 3);

    double support() const { return support_; }
    int size() const { return num_basis_; }
    int degree() const { return degree_; }
    const std::vector<double>& knots() const { return knots_; }

    // Writes the degree+1 possibly nonzero values at u into out and returns the
    // index of the first one; returns -1 (out untouched) outside [0, S).
    int evaluate_nonzero(double u, std::span<double> out) const;

    // All num_basis values at u (zeros outside the support).
    void evaluate(double u, std::span<double> out) const;
    Eigen::VectorXd evaluate(double u) const;

    // Value of the order-th derivative of basis function i at u (one-sided
    // from the right at knots).
    double derivative(int i, double u, int order) const;
    double value(int i, double u) const { return derivative(i, u, 0); }

    // Exact Gram matrix of the order-th derivatives, int_0^S b_i^(r) b_l^(r) du,
    // computed by Gauss-Legendre quadrature on every knot span.
    Eigen::MatrixXd gram(int order) const;

    bool operator==(const SplineBasis& other) const = default;

  private:
    int find_span(double u) const;
    // Derivatives 0..order of the degree+1 nonzero functions on span s at u.
    void basis_derivatives(int span, double u, int order, Eigen::MatrixXd& ders) const;

    double support_;
    int num_basis_;
    int degree_;
    std::vector<double> knots_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

} // namespace locind
