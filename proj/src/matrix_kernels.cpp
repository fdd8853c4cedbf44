#include "tnt/matrix_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tnt/rng.hpp"

namespace tnt {

namespace {

/// Flip signs so each U column has its largest-magnitude entry positive;
/// the matching V column flips with it.
void normalize_signs(MatrixXd& u, MatrixXd& v) {
    for (Index j = 0; j < u.cols(); ++j) {
        Index r = 0;
        u.col(j).cwiseAbs().maxCoeff(&r);
        if (u(r, j) < 0.0) {
            u.col(j) = -u.col(j);
            if (j < v.cols()) v.col(j) = -v.col(j);
        }
    }
}

Index rank_for_budget(const VectorXd& s, double eps_abs, std::optional<Index> max_rank) {
    const Index n = s.size();
    // Minimal R with sum of squared discarded values <= eps^2; ties among
    // equal singular values resolve to the earlier index automatically.
    double budget = eps_abs * eps_abs;
    double tail = 0.0;
    Index rank = n;
    for (Index j = n - 1; j >= 0; --j) {
        double t = tail + s(j) * s(j);
        if (t <= budget) {
            tail = t;
            rank = j;
        } else {
            break;
        }
    }
    if (max_rank && rank > *max_rank) rank = *max_rank;
    return rank;
}

SVDResult take_rank(const Eigen::BDCSVD<MatrixXd>& svd, Index rank, double frob_sq) {
    SVDResult out;
    out.U = svd.matrixU().leftCols(rank);
    out.S = svd.singularValues().head(rank);
    out.V = svd.matrixV().leftCols(rank);
    out.tail_energy = std::max(0.0, frob_sq - out.S.squaredNorm());
    normalize_signs(out.U, out.V);
    return out;
}

}  // namespace

SVDResult truncated_svd(const MatrixXd& m, const TruncationSpec& spec) {
    if (!m.allFinite()) throw std::invalid_argument("truncated_svd: non-finite input");
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Index rank = rank_for_budget(svd.singularValues(), spec.eps_abs, spec.max_rank);
    return take_rank(svd, rank, m.squaredNorm());
}

SVDResult randomized_svd(const MatrixXd& m, Index r_tilde, int q, std::uint64_t seed) {
    if (!m.allFinite()) throw std::invalid_argument("randomized_svd: non-finite input");
    if (r_tilde < 1 || r_tilde > std::min(m.rows(), m.cols()))
        throw std::invalid_argument("randomized_svd: rank out of range");
    if (q != 0 && q != 1) throw std::invalid_argument("randomized_svd: power exponent must be 0 or 1");

    MatrixXd omega = gaussian_matrix(m.cols(), r_tilde, seed);
    MatrixXd y = m * omega;
    if (q == 1) y = (m * m.transpose()) * y;
    MatrixXd qmat = thin_qr(y).first;
    MatrixXd a = qmat.transpose() * m;
    Eigen::BDCSVD<MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SVDResult out;
    out.U = qmat * svd.matrixU();
    out.S = svd.singularValues();
    out.V = svd.matrixV();
    out.tail_energy = std::max(0.0, m.squaredNorm() - out.S.squaredNorm());
    normalize_signs(out.U, out.V);
    return out;
}

SVDResult gram_svd_tall(const std::vector<MatrixXd>& slices) {
    if (slices.empty()) throw std::invalid_argument("gram_svd_tall: no slices");
    const Index rows = slices.front().rows();
    double frob_sq = 0.0;
    Index total_cols = 0;
    MatrixXd gram = MatrixXd::Zero(rows, rows);
    for (const auto& x : slices) {
        if (x.rows() != rows) throw std::invalid_argument("gram_svd_tall: row count mismatch");
        gram += x * x.transpose();
        frob_sq += x.squaredNorm();
        total_cols += x.cols();
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(gram);
    // Ascending eigenvalues; reverse into descending singular values.
    VectorXd lambda = eig.eigenvalues().reverse();
    MatrixXd u = eig.eigenvectors().rowwise().reverse();

    VectorXd sigma(rows);
    for (Index j = 0; j < rows; ++j) sigma(j) = std::sqrt(std::max(0.0, lambda(j)));
    // Drop sigma below 1e-14 * sigma_1; the Gram detour also raises the
    // numerical-zero floor to sqrt(eps), so rank-deficient directions are
    // additionally cut at the eigenvalue level.
    Index rank = 0;
    const double sigma_cut = 1e-14 * (sigma.size() ? sigma(0) : 0.0);
    const double lambda_cut = 1e-13 * std::max(lambda(0), 0.0);
    while (rank < rows && sigma(rank) > sigma_cut && lambda(rank) > lambda_cut) ++rank;

    SVDResult out;
    out.U = u.leftCols(rank);
    out.S = sigma.head(rank);
    out.tail_energy = std::max(0.0, frob_sq - out.S.squaredNorm());
    out.V.resize(total_cols, rank);
    MatrixXd us_inv = out.U * out.S.cwiseInverse().asDiagonal();
    Index row0 = 0;
    for (const auto& x : slices) {
        out.V.middleRows(row0, x.cols()) = x.transpose() * us_inv;
        row0 += x.cols();
    }
    normalize_signs(out.U, out.V);
    return out;
}

std::pair<MatrixXd, MatrixXd> thin_qr(const MatrixXd& m) {
    if (!m.allFinite()) throw std::invalid_argument("thin_qr: non-finite input");
    const Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<MatrixXd> qr(m);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(m.rows(), k);
    MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    return {std::move(q), std::move(r)};
}

std::pair<MatrixXd, MatrixXd> thin_lq(const MatrixXd& m) {
    auto [q, r] = thin_qr(m.transpose());
    return {r.transpose(), q.transpose()};
}

MatrixXd pinv(const MatrixXd& m, double rel_tol) {
    if (m.size() == 0) return m.transpose();
    Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& s = svd.singularValues();
    const double cutoff = rel_tol * (s.size() ? s(0) : 0.0);
    VectorXd s_inv = VectorXd::Zero(s.size());
    for (Index j = 0; j < s.size(); ++j)
        if (s(j) > cutoff) s_inv(j) = 1.0 / s(j);
    return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

CurResult mca_cur(const MatrixXd& m, const std::vector<Index>& col_idx,
                  const std::vector<Index>& row_idx) {
    if (col_idx.empty() || row_idx.empty())
        throw std::invalid_argument("mca_cur: empty index set");
    for (Index j : col_idx)
        if (j < 0 || j >= m.cols()) throw std::out_of_range("mca_cur: column index out of range");
    for (Index i : row_idx)
        if (i < 0 || i >= m.rows()) throw std::out_of_range("mca_cur: row index out of range");

    CurResult out{MatrixXd(m.rows(), static_cast<Index>(col_idx.size())),
                  MatrixXd(), MatrixXd(static_cast<Index>(row_idx.size()), m.cols()), 0.0, 0.0};
    for (std::size_t j = 0; j < col_idx.size(); ++j) out.C.col(static_cast<Index>(j)) = m.col(col_idx[j]);
    for (std::size_t i = 0; i < row_idx.size(); ++i) out.R.row(static_cast<Index>(i)) = m.row(row_idx[i]);

    MatrixXd w(static_cast<Index>(row_idx.size()), static_cast<Index>(col_idx.size()));
    for (std::size_t i = 0; i < row_idx.size(); ++i)
        for (std::size_t j = 0; j < col_idx.size(); ++j)
            w(static_cast<Index>(i), static_cast<Index>(j)) = m(row_idx[i], col_idx[j]);

    Eigen::BDCSVD<MatrixXd> wsvd(w);
    const VectorXd& s = wsvd.singularValues();
    const double smin = s(s.size() - 1);
    out.w_condition = (smin > 0.0) ? s(0) / smin : std::numeric_limits<double>::infinity();
    out.U = pinv(w);
    out.residual = (m - out.C * out.U * out.R).norm();
    return out;
}

std::pair<std::vector<Index>, std::vector<Index>> greedy_cross_pivots(const MatrixXd& m, Index k) {
    if (k < 1 || k > std::min(m.rows(), m.cols()))
        throw std::invalid_argument("greedy_cross_pivots: k out of range");
    MatrixXd resid = m;
    std::vector<Index> rows, cols;
    std::vector<bool> row_used(static_cast<std::size_t>(m.rows()), false);
    std::vector<bool> col_used(static_cast<std::size_t>(m.cols()), false);
    for (Index t = 0; t < k; ++t) {
        Index bi = -1, bj = -1;
        double best = -1.0;
        for (Index j = 0; j < m.cols(); ++j) {
            if (col_used[static_cast<std::size_t>(j)]) continue;
            for (Index i = 0; i < m.rows(); ++i) {
                if (row_used[static_cast<std::size_t>(i)]) continue;
                double v = std::abs(resid(i, j));
                if (v > best) { best = v; bi = i; bj = j; }
            }
        }
        rows.push_back(bi);
        cols.push_back(bj);
        row_used[static_cast<std::size_t>(bi)] = true;
        col_used[static_cast<std::size_t>(bj)] = true;
        const double pivot = resid(bi, bj);
        if (pivot != 0.0) resid -= resid.col(bj) * resid.row(bi) / pivot;
    }
    return {std::move(rows), std::move(cols)};
}

MatrixXd gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.gaussian();
    return m;
}

MatrixXd random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
    if (cols > rows) throw std::invalid_argument("random_orthonormal: cols exceed rows");
    return thin_qr(gaussian_matrix(rows, cols, seed)).first;
}

}  // namespace tnt
