#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tnt/tensor.hpp"

namespace tnt {

/// Frobenius-error budget plus optional rank cap. When both are given the
/// eps rule is applied first, then the cap.
struct TruncationSpec {
    double eps_abs = 0.0;
    std::optional<Index> max_rank;
};

struct SVDResult {
    MatrixXd U;           // orthonormal columns
    VectorXd S;           // nonincreasing, nonnegative
    MatrixXd V;           // orthonormal columns
    double tail_energy;   // sum of squared discarded singular values

    Index rank() const { return S.size(); }
    MatrixXd reconstruct() const { return U * S.asDiagonal() * V.transpose(); }
};

/// Rank-revealing truncated SVD: keeps the minimal rank R with
/// sum_{j>R} sigma_j^2 <= eps_abs^2, then applies the rank cap. Each left
/// column is scaled so its largest-magnitude entry is positive, which makes
/// results comparable across the factorization routines here.
SVDResult truncated_svd(const MatrixXd& m, const TruncationSpec& spec);

/// Single-sketch randomized SVD: Gaussian test matrix, optional one power
/// iteration, thin QR, small dense SVD. Deterministic for a fixed seed.
SVDResult randomized_svd(const MatrixXd& m, Index r_tilde, int q, std::uint64_t seed);

/// SVD of the implicit concatenation [X_1, X_2, ...] sharing the row count,
/// computed from the Gram matrix sum X_q X_q^T. Singular values below
/// 1e-14 * sigma_1 are dropped before the inversion that recovers V.
SVDResult gram_svd_tall(const std::vector<MatrixXd>& slices);

/// Thin QR: M = Q R with Q^T Q = I.
std::pair<MatrixXd, MatrixXd> thin_qr(const MatrixXd& m);

/// Thin LQ: M = L Q with Q Q^T = I.
std::pair<MatrixXd, MatrixXd> thin_lq(const MatrixXd& m);

/// Moore-Penrose pseudo-inverse with a relative singular value threshold.
MatrixXd pinv(const MatrixXd& m, double rel_tol = 1e-12);

struct CurResult {
    MatrixXd C, U, R;
    double residual;      // ||M - C U R||_F
    double w_condition;   // sigma_max / sigma_min of the intersection block
};

/// Cross approximation M ~ C U R with U the pseudo-inverse of the
/// row/column intersection block. Ill-conditioning is reported through
/// w_condition rather than silently inverted.
CurResult mca_cur(const MatrixXd& m, const std::vector<Index>& col_idx,
                  const std::vector<Index>& row_idx);

/// Greedy cross pivots: successive full-pivot selection on the deflated
/// residual, distinct rows and columns, deterministic tie-breaking.
std::pair<std::vector<Index>, std::vector<Index>> greedy_cross_pivots(const MatrixXd& m, Index k);

/// Gaussian random matrix (rows x cols) from the library's seeded generator.
MatrixXd gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

/// Random matrix with orthonormal columns (rows >= cols).
MatrixXd random_orthonormal(Index rows, Index cols, std::uint64_t seed);

}  // namespace tnt
