#pragma once

#include <Eigen/Dense>

#include "locind/bspline.hpp"
#include "locind/features.hpp"

namespace locind {

/*!
 * Roughness penalty Omega over the full coefficient vector of a design.
 *
 * Univariate blocks get the Gram matrix of second derivatives. Tensor blocks
 * get the Kronecker-sum penalty Omega1 (x) M + M (x) Omega1 (M the basis Gram
 * matrix); for same-mark blocks it is pulled back through the map from the
 * i1 <= i2 coefficients to the symmetric coefficient matrix. The intercept is
 * unpenalized.
 */
Eigen::MatrixXd roughness_penalty(const DesignLayout& layout, const SplineBasis& basis);

} // namespace locind
