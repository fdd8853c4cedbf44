#pragma once

#include <vector>

#include "tnt/tensor.hpp"

namespace tnt {

/// R1 x R2 grid of equally sized I x J blocks. Grid storage is little-endian
/// (row index fastest), matching the rest of the library.
class BlockMatrix {
public:
    BlockMatrix(Index grid_rows, Index grid_cols, Index block_rows, Index block_cols)
        : grid_rows_(grid_rows), grid_cols_(grid_cols), block_rows_(block_rows),
          block_cols_(block_cols),
          blocks_(static_cast<std::size_t>(grid_rows * grid_cols),
                  MatrixXd::Zero(block_rows, block_cols)) {
        if (grid_rows < 1 || grid_cols < 1 || block_rows < 1 || block_cols < 1)
            throw std::invalid_argument("BlockMatrix: non-positive dimension");
    }

    Index grid_rows() const { return grid_rows_; }
    Index grid_cols() const { return grid_cols_; }
    Index block_rows() const { return block_rows_; }
    Index block_cols() const { return block_cols_; }

    const MatrixXd& block(Index r1, Index r2) const { return blocks_[offset(r1, r2)]; }
    MatrixXd& block(Index r1, Index r2) { return blocks_[offset(r1, r2)]; }

    /// Flatten to the (R1*I) x (R2*J) matrix with block (r1, r2) at
    /// offset (r1*I, r2*J).
    MatrixXd flatten() const {
        MatrixXd m = MatrixXd::Zero(grid_rows_ * block_rows_, grid_cols_ * block_cols_);
        for (Index r2 = 0; r2 < grid_cols_; ++r2)
            for (Index r1 = 0; r1 < grid_rows_; ++r1)
                m.block(r1 * block_rows_, r2 * block_cols_, block_rows_, block_cols_) =
                    block(r1, r2);
        return m;
    }

private:
    std::size_t offset(Index r1, Index r2) const {
        if (r1 < 0 || r1 >= grid_rows_ || r2 < 0 || r2 >= grid_cols_)
            throw std::out_of_range("BlockMatrix: grid index out of range");
        return static_cast<std::size_t>(r1 + grid_rows_ * r2);
    }

    Index grid_rows_, grid_cols_, block_rows_, block_cols_;
    std::vector<MatrixXd> blocks_;
};

/// Left Kronecker product of plain matrices: A kron_L B = B kron A.
MatrixXd kron_left(const MatrixXd& a, const MatrixXd& b);

/// Strong Kronecker product: block matrix multiplication with kron_L of
/// blocks in place of scalar products. Grids R1xR2 and R2xR3 chain to R1xR3.
BlockMatrix strong_kron(const BlockMatrix& a, const BlockMatrix& b);

/// C (core) product: blocks multiply as ordinary matrices and the grid
/// indices merge little-endian with A's index fastest.
BlockMatrix c_product(const BlockMatrix& a, const BlockMatrix& b);

}  // namespace tnt
