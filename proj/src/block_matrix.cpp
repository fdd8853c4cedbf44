#include "tnt/block_matrix.hpp"

namespace tnt {

MatrixXd kron_left(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd c(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
            c.block(k * a.rows(), l * a.cols(), a.rows(), a.cols()) = b(k, l) * a;
    return c;
}

BlockMatrix strong_kron(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.grid_cols() != b.grid_rows())
        throw std::invalid_argument("strong_kron: inner grid dimensions do not chain");
    BlockMatrix c(a.grid_rows(), b.grid_cols(), a.block_rows() * b.block_rows(),
                  a.block_cols() * b.block_cols());
    for (Index r1 = 0; r1 < a.grid_rows(); ++r1)
        for (Index r3 = 0; r3 < b.grid_cols(); ++r3) {
            MatrixXd sum = MatrixXd::Zero(c.block_rows(), c.block_cols());
            for (Index r2 = 0; r2 < a.grid_cols(); ++r2)
                sum += kron_left(a.block(r1, r2), b.block(r2, r3));
            c.block(r1, r3) = sum;
        }
    return c;
}

BlockMatrix c_product(const BlockMatrix& a, const BlockMatrix& b) {
    if (a.block_cols() != b.block_rows())
        throw std::invalid_argument("c_product: inner block dimensions do not chain");
    BlockMatrix c(a.grid_rows() * b.grid_rows(), a.grid_cols() * b.grid_cols(), a.block_rows(),
                  b.block_cols());
    for (Index p = 0; p < a.grid_rows(); ++p)
        for (Index pp = 0; pp < a.grid_cols(); ++pp)
            for (Index r = 0; r < b.grid_rows(); ++r)
                for (Index rp = 0; rp < b.grid_cols(); ++rp)
                    c.block(p + a.grid_rows() * r, pp + a.grid_cols() * rp) =
                        a.block(p, pp) * b.block(r, rp);
    return c;
}

}  // namespace tnt
