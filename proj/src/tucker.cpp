#include "tnt/tucker.hpp"

#include <cmath>

#include "tnt/block_matrix.hpp"
#include "tnt/matrix_kernels.hpp"
#include "tnt/rng.hpp"
#include "tnt/tensor_ops.hpp"

namespace tnt {

void TuckerTensor::validate() const {
    if (core.order() != order())
        throw std::invalid_argument("TuckerTensor: core order differs from factor count");
    for (Index n = 0; n < order(); ++n) {
        const auto& f = factors[static_cast<std::size_t>(n)];
        if (f.cols() != core.dim(n))
            throw std::invalid_argument("TuckerTensor: factor " + std::to_string(n) +
                                        " column count differs from core mode size");
        if (orthonormal && (f.transpose() * f - MatrixXd::Identity(f.cols(), f.cols())).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("TuckerTensor: orthonormal flag set but factor is not");
    }
}

DenseTensor tucker_full(const TuckerTensor& t) {
    t.validate();
    return multilinear_product(t.core, t.factors);
}

namespace {

/// Make the core of an orthonormal Tucker tensor all-orthogonal by a full
/// HOSVD of the core itself, absorbing the rotations into the factors.
/// Leaves the reconstructed tensor unchanged.
void diagonalize_core(TuckerTensor& t) {
    for (Index n = 0; n < t.order(); ++n) {
        MatrixXd g = matricize_mode(t.core, n);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(g * g.transpose());
        MatrixXd w = eig.eigenvectors().rowwise().reverse();  // descending order
        t.core = mode_product(t.core, w.transpose(), n);
        t.factors[static_cast<std::size_t>(n)] = t.factors[static_cast<std::size_t>(n)] * w;
    }
}

}  // namespace

TuckerTensor sthosvd(const DenseTensor& t, double eps_abs) {
    if (eps_abs < 0.0) throw std::invalid_argument("sthosvd: negative budget");
    const Index order = t.order();
    TuckerTensor out;
    out.core = t;
    out.orthonormal = true;
    const double per_mode = (order > 0) ? eps_abs / std::sqrt(static_cast<double>(order)) : 0.0;
    for (Index n = 0; n < order; ++n) {
        SVDResult svd = truncated_svd(matricize_mode(out.core, n), {per_mode, std::nullopt});
        MatrixXd u = svd.U;
        if (u.cols() == 0) u = MatrixXd::Identity(t.dim(n), 1);  // keep modes non-empty
        out.factors.push_back(u);
        out.core = mode_product(out.core, u.transpose(), n);
    }
    diagonalize_core(out);
    return out;
}

TuckerTensor sthosvd_ranks(const DenseTensor& t, std::span<const Index> ranks) {
    if (static_cast<Index>(ranks.size()) != t.order())
        throw std::invalid_argument("sthosvd_ranks: need one rank per mode");
    TuckerTensor out;
    out.core = t;
    out.orthonormal = true;
    for (Index n = 0; n < t.order(); ++n) {
        if (ranks[static_cast<std::size_t>(n)] < 1 || ranks[static_cast<std::size_t>(n)] > t.dim(n))
            throw std::invalid_argument("sthosvd_ranks: rank out of range on mode " + std::to_string(n));
        SVDResult svd = truncated_svd(matricize_mode(out.core, n),
                                      {0.0, ranks[static_cast<std::size_t>(n)]});
        MatrixXd u = svd.U;
        if (u.cols() < ranks[static_cast<std::size_t>(n)]) {
            // Rank-deficient data: complete the basis deterministically.
            MatrixXd ext(t.dim(n), u.cols() + t.dim(n));
            ext << u, MatrixXd::Identity(t.dim(n), t.dim(n));
            u = thin_qr(ext).first.leftCols(ranks[static_cast<std::size_t>(n)]);
        }
        out.factors.push_back(u);
        out.core = mode_product(out.core, u.transpose(), n);
    }
    diagonalize_core(out);
    return out;
}

TuckerTensor hooi(const DenseTensor& t, std::span<const Index> ranks, const HooiOptions& opts) {
    TuckerTensor cur = sthosvd_ranks(t, ranks);
    const double t_sq = t.norm() * t.norm();
    double prev_cost = t_sq - cur.core.norm() * cur.core.norm();
    for (Index sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        for (Index n = 0; n < t.order(); ++n) {
            DenseTensor z = multilinear_product_t_skip(t, cur.factors, n);
            MatrixXd zn = matricize_mode(z, n);
            Eigen::SelfAdjointEigenSolver<MatrixXd> eig(zn * zn.transpose());
            cur.factors[static_cast<std::size_t>(n)] =
                eig.eigenvectors().rowwise().reverse().leftCols(ranks[static_cast<std::size_t>(n)]);
        }
        cur.core = multilinear_product_t(t, cur.factors);
        const double cost = t_sq - cur.core.norm() * cur.core.norm();
        if (prev_cost - cost < opts.tol * std::max(1.0, t_sq)) { prev_cost = cost; break; }
        prev_cost = cost;
    }
    diagonalize_core(cur);
    return cur;
}

TuckerTensor hooi_randomized(const DenseTensor& t, std::span<const Index> ranks,
                             std::uint64_t seed, Index sweeps) {
    if (static_cast<Index>(ranks.size()) != t.order())
        throw std::invalid_argument("hooi_randomized: need one rank per mode");
    TuckerTensor cur;
    cur.core = t;
    cur.orthonormal = true;
    Rng root(seed);
    for (Index n = 0; n < t.order(); ++n)
        cur.factors.push_back(
            gaussian_matrix(t.dim(n), ranks[static_cast<std::size_t>(n)],
                            root.split(static_cast<std::uint64_t>(n)).next_u64()));
    Rng omega_rng = root.split(0x5eedull);
    for (Index sweep = 0; sweep < sweeps; ++sweep) {
        for (Index n = 0; n < t.order(); ++n) {
            DenseTensor z = multilinear_product_t_skip(t, cur.factors, n);
            MatrixXd zn = matricize_mode(z, n);
            MatrixXd omega = gaussian_matrix(zn.cols(), ranks[static_cast<std::size_t>(n)],
                                             omega_rng.next_u64());
            cur.factors[static_cast<std::size_t>(n)] = thin_qr(zn * omega).first;
        }
    }
    cur.core = multilinear_product_t(t, cur.factors);
    diagonalize_core(cur);
    return cur;
}

TuckerTensor tucker_via_lrmf(const DenseTensor& t, std::span<const Index> ranks,
                             const LrmfFactor& lrmf) {
    if (static_cast<Index>(ranks.size()) != t.order())
        throw std::invalid_argument("tucker_via_lrmf: need one rank per mode");
    TuckerTensor out;
    out.orthonormal = false;
    for (Index n = 0; n < t.order(); ++n) {
        MatrixXd b = lrmf(matricize_mode(t, n), ranks[static_cast<std::size_t>(n)]);
        if (b.rows() != t.dim(n) || b.cols() != ranks[static_cast<std::size_t>(n)])
            throw std::invalid_argument("tucker_via_lrmf: callback returned wrong factor shape");
        out.factors.push_back(std::move(b));
    }
    out.core = t;
    for (Index n = 0; n < t.order(); ++n)
        out.core = mode_product(out.core, pinv(out.factors[static_cast<std::size_t>(n)]), n);
    return out;
}

namespace {

/// Retained-eigenvalue rank rule from the Tucker-2 algorithm: smallest R
/// with cumulative eigenvalue sum >= target. Eigenvalues below the Gram
/// noise floor (1e-12 * lambda_1) are numerical zeros and never retained,
/// otherwise tiny budgets would keep phantom directions on exactly
/// low-rank data.
Index eigen_rank(const VectorXd& lambda_desc, double target) {
    const double cut = (lambda_desc.size() ? std::max(lambda_desc(0), 0.0) : 0.0) * 1e-12;
    Index numerical = 0;
    while (numerical < lambda_desc.size() && lambda_desc(numerical) > cut) ++numerical;
    numerical = std::max<Index>(numerical, 1);
    double acc = 0.0;
    for (Index r = 0; r < numerical; ++r) {
        acc += std::max(0.0, lambda_desc(r));
        if (acc >= target) return r + 1;
    }
    return numerical;
}

}  // namespace

Tucker2Result tucker2(const DenseTensor& t3, double eps_abs, const Tucker2Options& opts) {
    if (t3.order() != 3) throw std::invalid_argument("tucker2: order-3 input required");
    const double target = t3.norm() * t3.norm() - eps_abs * eps_abs;
    Tucker2Result out;
    out.A = MatrixXd::Identity(t3.dim(0), t3.dim(0));
    double prev_sum1 = -1.0, prev_sum2 = -1.0;
    for (Index sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        ++out.iterations;
        DenseTensor z1 = mode_product(t3, out.A.transpose(), 0);
        MatrixXd z1m = matricize_mode(z1, 1);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig1(z1m * z1m.transpose());
        VectorXd l1 = eig1.eigenvalues().reverse();
        Index r2 = eigen_rank(l1, target);
        out.B = eig1.eigenvectors().rowwise().reverse().leftCols(r2);
        double sum1 = l1.head(r2).sum();

        DenseTensor z2 = mode_product(t3, out.B.transpose(), 1);
        MatrixXd z2m = matricize_mode(z2, 0);
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig2(z2m * z2m.transpose());
        VectorXd l2 = eig2.eigenvalues().reverse();
        Index r1 = eigen_rank(l2, target);
        out.A = eig2.eigenvectors().rowwise().reverse().leftCols(r1);
        double sum2 = l2.head(r1).sum();

        const double scale = std::max(1.0, t3.norm() * t3.norm());
        if (std::abs(sum1 - prev_sum1) < opts.tol * scale &&
            std::abs(sum2 - prev_sum2) < opts.tol * scale)
            break;
        prev_sum1 = sum1;
        prev_sum2 = sum2;
    }
    out.core = mode_product(mode_product(t3, out.A.transpose(), 0), out.B.transpose(), 1);
    return out;
}

PvdResult pvd(const std::vector<MatrixXd>& slices, Index r, Index r1, Index r2) {
    if (slices.empty()) throw std::invalid_argument("pvd: no slices");
    const Index rows = slices.front().rows();
    const Index cols = slices.front().cols();
    MatrixXd u_stack(rows, static_cast<Index>(slices.size()) * r);
    MatrixXd v_stack(cols, static_cast<Index>(slices.size()) * r);
    Index col0 = 0;
    for (const auto& x : slices) {
        if (x.rows() != rows || x.cols() != cols)
            throw std::invalid_argument("pvd: slice shape mismatch");
        SVDResult svd = truncated_svd(x, {0.0, r});
        const Index k = svd.rank();
        u_stack.middleCols(col0, r).setZero();
        v_stack.middleCols(col0, r).setZero();
        u_stack.middleCols(col0, k) = svd.U * svd.S.asDiagonal();
        v_stack.middleCols(col0, k) = svd.V * svd.S.asDiagonal();
        col0 += r;
    }
    PvdResult out;
    out.A = truncated_svd(u_stack, {0.0, r1}).U;
    out.B = truncated_svd(v_stack, {0.0, r2}).U;
    out.cores.reserve(slices.size());
    for (const auto& x : slices) out.cores.push_back(out.A.transpose() * x * out.B);
    return out;
}

// --- Tucker-format arithmetic ------------------------------------------------

namespace {

void check_same_shape(const TuckerTensor& x, const TuckerTensor& y, const char* who) {
    if (x.shape() != y.shape())
        throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

}  // namespace

TuckerTensor tucker_add(const TuckerTensor& x, const TuckerTensor& y) {
    check_same_shape(x, y, "tucker_add");
    TuckerTensor out;
    out.core = direct_sum(x.core, y.core);
    for (Index n = 0; n < x.order(); ++n) {
        const auto& fx = x.factors[static_cast<std::size_t>(n)];
        const auto& fy = y.factors[static_cast<std::size_t>(n)];
        MatrixXd f(fx.rows(), fx.cols() + fy.cols());
        f << fx, fy;
        out.factors.push_back(std::move(f));
    }
    return out;
}

TuckerTensor tucker_kron(const TuckerTensor& x, const TuckerTensor& y) {
    if (x.order() != y.order()) throw std::invalid_argument("tucker_kron: order mismatch");
    TuckerTensor out;
    out.core = kron(x.core, y.core);
    for (Index n = 0; n < x.order(); ++n)
        out.factors.push_back(kron_left(x.factors[static_cast<std::size_t>(n)],
                                        y.factors[static_cast<std::size_t>(n)]));
    return out;
}

TuckerTensor tucker_hadamard(const TuckerTensor& x, const TuckerTensor& y) {
    check_same_shape(x, y, "tucker_hadamard");
    TuckerTensor out;
    out.core = kron(x.core, y.core);
    for (Index n = 0; n < x.order(); ++n)
        out.factors.push_back(khatri_rao_rows(x.factors[static_cast<std::size_t>(n)],
                                              y.factors[static_cast<std::size_t>(n)]));
    return out;
}

TuckerTensor tucker_convolve(const TuckerTensor& x, const TuckerTensor& y) {
    if (x.order() != y.order()) throw std::invalid_argument("tucker_convolve: order mismatch");
    TuckerTensor out;
    out.core = kron(x.core, y.core);
    for (Index n = 0; n < x.order(); ++n) {
        const auto& fx = x.factors[static_cast<std::size_t>(n)];
        const auto& fy = y.factors[static_cast<std::size_t>(n)];
        MatrixXd f = MatrixXd::Zero(fx.rows() + fy.rows() - 1, fx.cols() * fy.cols());
        for (Index q = 0; q < fy.cols(); ++q)
            for (Index r = 0; r < fx.cols(); ++r)
                for (Index j = 0; j < fy.rows(); ++j)
                    for (Index i = 0; i < fx.rows(); ++i)
                        f(i + j, r + fx.cols() * q) += fx(i, r) * fy(j, q);
        out.factors.push_back(std::move(f));
    }
    return out;
}

double tucker_inner(const TuckerTensor& x, const TuckerTensor& y) {
    check_same_shape(x, y, "tucker_inner");
    DenseTensor reduced = y.core;
    for (Index n = 0; n < x.order(); ++n)
        reduced = mode_product(reduced,
                               x.factors[static_cast<std::size_t>(n)].transpose() *
                                   y.factors[static_cast<std::size_t>(n)],
                               n);
    // y's core mapped into x's reduced space.
    return x.core.as_vector().dot(reduced.as_vector());
}

double tucker_norm(const TuckerTensor& x) {
    if (x.orthonormal) return x.core.norm();
    return std::sqrt(std::max(0.0, tucker_inner(x, x)));
}

TuckerTensor tucker_modewise_transform(const TuckerTensor& x, std::span<const MatrixXd> maps) {
    if (static_cast<Index>(maps.size()) != x.order())
        throw std::invalid_argument("tucker_modewise_transform: need one map per mode");
    TuckerTensor out = x;
    out.orthonormal = false;
    for (Index n = 0; n < x.order(); ++n) {
        if (maps[static_cast<std::size_t>(n)].cols() != x.factors[static_cast<std::size_t>(n)].rows())
            throw std::invalid_argument("tucker_modewise_transform: map shape mismatch on mode " +
                                        std::to_string(n));
        out.factors[static_cast<std::size_t>(n)] =
            maps[static_cast<std::size_t>(n)] * x.factors[static_cast<std::size_t>(n)];
    }
    return out;
}

std::vector<Index> multilinear_rank(const DenseTensor& t, double tol) {
    if (tol < 0.0) throw std::invalid_argument("multilinear_rank: negative tolerance");
    std::vector<Index> ranks;
    for (Index n = 0; n < t.order(); ++n) {
        Eigen::BDCSVD<MatrixXd> svd(matricize_mode(t, n));
        const VectorXd& s = svd.singularValues();
        Index r = 0;
        if (s.size() > 0 && s(0) > 0.0)
            while (r < s.size() && s(r) >= tol * s(0) && s(r) > 0.0) ++r;
        ranks.push_back(r);
    }
    return ranks;
}

}  // namespace tnt
