#include <doctest.h>

#include "oracles.hpp"
#include "tnt/generators.hpp"
#include "tnt/matrix_kernels.hpp"

using namespace tnt;

namespace {

double ortho_defect(const MatrixXd& q) {
    return (q.transpose() * q - MatrixXd::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

/// Matrix with prescribed singular values.
MatrixXd with_spectrum(Index rows, Index cols, const VectorXd& sigma, std::uint64_t seed) {
    MatrixXd u = random_orthonormal(rows, sigma.size(), seed);
    MatrixXd v = random_orthonormal(cols, sigma.size(), seed + 1);
    return u * sigma.asDiagonal() * v.transpose();
}

}  // namespace

TEST_CASE("truncated_svd keeps the minimal rank for the budget") {
    MatrixXd id = MatrixXd::Identity(3, 3);
    SVDResult full = truncated_svd(id, {0.0, std::nullopt});
    CHECK(full.rank() == 3);
    CHECK((full.S - VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);

    VectorXd a = gaussian_matrix(5, 1, 1).col(0);
    VectorXd b = gaussian_matrix(4, 1, 2).col(0);
    SVDResult r1 = truncated_svd(a * b.transpose(), {1e-12, std::nullopt});
    CHECK(r1.rank() == 1);
    CHECK(r1.S(0) == doctest::Approx(a.norm() * b.norm()).epsilon(1e-12));

    // eps^2 placed between the discard-after-3 and discard-after-2 tails:
    // exactly rank 3 kept.
    VectorXd sigma(6);
    sigma << 10, 5, 2, 0.5, 0.2, 0.1;
    MatrixXd m = with_spectrum(6, 8, sigma, 3);
    const double tail_after_3 = 0.5 * 0.5 + 0.2 * 0.2 + 0.1 * 0.1;  // 0.3
    const double tail_after_2 = 2.0 * 2.0 + tail_after_3;           // 4.3
    SVDResult r3 = truncated_svd(m, {std::sqrt((tail_after_3 + tail_after_2) / 2.0), std::nullopt});
    CHECK(r3.rank() == 3);
    CHECK(r3.tail_energy == doctest::Approx(tail_after_3).epsilon(1e-8));
    CHECK(oracle::sigma_tail_sq(m, 3) == doctest::Approx(r3.tail_energy).epsilon(1e-8));

    // Rank cap wins after the eps rule.
    SVDResult capped = truncated_svd(m, {0.0, 2});
    CHECK(capped.rank() == 2);

    MatrixXd bad = m;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(truncated_svd(bad, {0.0, std::nullopt}), std::invalid_argument);
}

TEST_CASE("truncated_svd energy bookkeeping and orthonormality") {
    MatrixXd m = gaussian_matrix(7, 5, 4);
    for (double eps : {0.0, 0.5, 2.0}) {
        SVDResult r = truncated_svd(m, {eps, std::nullopt});
        CHECK(r.tail_energy + r.S.squaredNorm() ==
              doctest::Approx(m.squaredNorm()).epsilon(1e-10));
        CHECK(ortho_defect(r.U) < 1e-12);
        CHECK(ortho_defect(r.V) < 1e-12);
        // Sign convention: largest-magnitude entry of each left column positive.
        for (Index j = 0; j < r.rank(); ++j) {
            Index at = 0;
            r.U.col(j).cwiseAbs().maxCoeff(&at);
            CHECK(r.U(at, j) > 0.0);
        }
    }
}

TEST_CASE("randomized_svd captures exact low rank and is deterministic") {
    VectorXd sigma(2);
    sigma << 3, 1;
    MatrixXd m = with_spectrum(8, 7, sigma, 5);
    SVDResult r = randomized_svd(m, 3, 0, 42);
    CHECK((m - r.reconstruct()).norm() < 1e-10);

    SVDResult again = randomized_svd(m, 3, 0, 42);
    CHECK(r.U == again.U);
    CHECK(r.S == again.S);
    CHECK(r.V == again.V);

    CHECK_THROWS_AS(randomized_svd(m, 9, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(randomized_svd(m, 2, 2, 0), std::invalid_argument);
}

TEST_CASE("one power iteration helps on slowly decaying spectra (median of 20)") {
    VectorXd sigma(8);
    for (Index i = 0; i < 8; ++i) sigma(i) = std::pow(0.8, static_cast<double>(i));
    MatrixXd m = with_spectrum(16, 16, sigma, 6);
    std::vector<double> gain;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const double e0 = (m - randomized_svd(m, 4, 0, seed).reconstruct()).norm();
        const double e1 = (m - randomized_svd(m, 4, 1, seed).reconstruct()).norm();
        gain.push_back(e0 - e1);
    }
    std::sort(gain.begin(), gain.end());
    CHECK(gain[10] >= 0.0);  // median improvement is nonnegative
}

TEST_CASE("gram_svd_tall matches the dense SVD of the concatenation") {
    MatrixXd x1 = gaussian_matrix(5, 7, 7);
    MatrixXd x2 = gaussian_matrix(5, 4, 8);
    SVDResult got = gram_svd_tall({x1, x2});
    MatrixXd concat(5, 11);
    concat << x1, x2;
    SVDResult want = truncated_svd(concat, {0.0, std::nullopt});
    CHECK((got.S - want.S).cwiseAbs().maxCoeff() < 1e-10);
    // Sign convention makes the factors directly comparable.
    CHECK((got.U - want.U).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((got.reconstruct() - concat).norm() < 1e-9);

    // Single slice agrees with the plain truncated SVD.
    SVDResult single = gram_svd_tall({x1});
    SVDResult direct = truncated_svd(x1, {0.0, std::nullopt});
    CHECK((single.S - direct.S).cwiseAbs().maxCoeff() < 1e-10);

    // Rank-deficient input: tiny sigmas are dropped, no division blowup.
    MatrixXd low = with_spectrum(5, 9, (VectorXd(2) << 2.0, 1.0).finished(), 9);
    SVDResult lr = gram_svd_tall({low.leftCols(5), low.rightCols(4)});
    CHECK(lr.rank() == 2);
    CHECK(lr.V.allFinite());
}

TEST_CASE("thin QR and LQ") {
    MatrixXd m = gaussian_matrix(6, 3, 10);
    auto [q, r] = thin_qr(m);
    CHECK(ortho_defect(q) < 1e-12);
    CHECK((q * r - m).cwiseAbs().maxCoeff() < 1e-12);
    for (Index i = 1; i < r.rows(); ++i)
        for (Index j = 0; j < i; ++j) CHECK(r(i, j) == 0.0);

    // Orthonormal input: R is the identity up to signs.
    auto [q2, r2] = thin_qr(q);
    CHECK((r2.cwiseAbs() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

    // Rank-deficient column: still an exact reconstruction.
    MatrixXd rd(4, 3);
    rd.col(0) = gaussian_matrix(4, 1, 11).col(0);
    rd.col(1) = 2.0 * rd.col(0);
    rd.col(2) = gaussian_matrix(4, 1, 12).col(0);
    auto [q3, r3] = thin_qr(rd);
    CHECK((q3 * r3 - rd).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(r3(1, 1)) < 1e-12);

    auto [l, qq] = thin_lq(m.transpose());
    CHECK((l * qq - m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((qq * qq.transpose() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mca_cur basics") {
    // Exact rank-2 matrix with any two independent rows/columns.
    VectorXd sigma(2);
    sigma << 2, 1;
    MatrixXd m = with_spectrum(6, 6, sigma, 13);
    CurResult cur = mca_cur(m, {0, 3}, {1, 4});
    CHECK(cur.residual < 1e-10);

    // The core is the pseudo-inverse of the intersection block.
    MatrixXd w(2, 2);
    w << m(1, 0), m(1, 3), m(4, 0), m(4, 3);
    CHECK((cur.U - pinv(w)).cwiseAbs().maxCoeff() < 1e-8);

    CHECK_THROWS_AS(mca_cur(m, {}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(mca_cur(m, {9}, {0}), std::out_of_range);
}

TEST_CASE("greedy pivots feed a near-optimal CUR") {
    MatrixXd rank1 = with_spectrum(5, 4, (VectorXd(1) << 2.0).finished(), 14);
    auto [rows1, cols1] = greedy_cross_pivots(rank1, 1);
    Index bi = 0, bj = 0;
    rank1.cwiseAbs().maxCoeff(&bi, &bj);
    CHECK(rows1[0] == bi);
    CHECK(cols1[0] == bj);

    MatrixXd diag = MatrixXd::Zero(4, 4);
    diag.diagonal() << 1.0, 7.0, 3.0, 5.0;
    auto [rows2, cols2] = greedy_cross_pivots(diag, 2);
    CHECK(rows2 == std::vector<Index>{1, 3});
    CHECK(cols2 == std::vector<Index>{1, 3});

    VectorXd sigma(3);
    sigma << 4, 2, 1;
    MatrixXd m = with_spectrum(8, 8, sigma, 15);
    auto [rows3, cols3] = greedy_cross_pivots(m, 3);
    MatrixXd w(3, 3);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) w(i, j) = m(rows3[static_cast<std::size_t>(i)],
                                                   cols3[static_cast<std::size_t>(j)]);
    CHECK(std::abs(w.determinant()) > 1e-10);

    // Greedy-pivot CUR residual within 5x of the optimal rank-3 error.
    MatrixXd noisy = m + 0.01 * gaussian_matrix(8, 8, 16);
    auto [rows4, cols4] = greedy_cross_pivots(noisy, 3);
    CurResult cur = mca_cur(noisy, cols4, rows4);
    SVDResult best = truncated_svd(noisy, {0.0, 3});
    const double optimal = (noisy - best.reconstruct()).norm();
    CHECK(cur.residual <= 5.0 * optimal);

    CHECK_THROWS_AS(greedy_cross_pivots(m, 9), std::invalid_argument);
}

TEST_CASE("Eckart-Young sanity across the factorization routines") {
    MatrixXd m = gaussian_matrix(8, 6, 17);
    const Index k = 3;
    SVDResult best = truncated_svd(m, {0.0, k});
    const double err_svd = (m - best.reconstruct()).norm();

    SVDResult rand = randomized_svd(m, k, 1, 18);
    CHECK(err_svd <= (m - rand.reconstruct()).norm() + 1e-10);

    auto [rows, cols] = greedy_cross_pivots(m, k);
    CurResult cur = mca_cur(m, cols, rows);
    CHECK(err_svd <= cur.residual + 1e-10);
}
