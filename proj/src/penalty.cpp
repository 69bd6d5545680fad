#include "locind/penalty.hpp"

#include "locind/error.hpp"

namespace locind {

namespace {

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

} // namespace

Eigen::MatrixXd roughness_penalty(const DesignLayout& layout, const SplineBasis& basis)
{
    const int nb = basis.size();
    if (layout.num_basis() != nb)
        throw Error(Errc::DimensionMismatch, "layout and basis disagree on the number of basis functions");
    const Eigen::MatrixXd curvature = basis.gram(2);
    const Eigen::MatrixXd mass = basis.gram(0);
    const Eigen::MatrixXd tensor = kronecker(curvature, mass) + kronecker(mass, curvature);

    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(layout.columns(), layout.columns());
    for (const auto& block : layout.blocks()) {
        auto sub = omega.block(block.offset, block.offset, block.size, block.size);
        switch (block.kind) {
        case BlockKind::Intercept:
            break;
        case BlockKind::FirstOrder:
        case BlockKind::Test:
            sub = curvature;
            break;
        case BlockKind::SecondOrder:
            if (block.mark1 != block.mark2) {
                sub = tensor;
            } else {
                const TensorBasis tb(nb, true);
                Eigen::MatrixXd dup = Eigen::MatrixXd::Zero(nb * nb, tb.size());
                for (int c = 0; c < tb.size(); ++c) {
                    const auto [a, b] = tb.pairs()[static_cast<std::size_t>(c)];
                    dup(a * nb + b, c) = 1.0;
                    dup(b * nb + a, c) = 1.0;
                }
                sub = dup.transpose() * tensor * dup;
            }
            break;
        }
    }
    return 0.5 * (omega + omega.transpose());
}

} // namespace locind
