#include "tnt/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tnt/matrix_kernels.hpp"
#include "tnt/rng.hpp"
#include "tnt/tensor_ops.hpp"

namespace tnt {

namespace {

/// Orthonormal DCT-II matrix of size n.
MatrixXd dct_matrix(Index n) {
    MatrixXd f(n, n);
    const double pi = 3.14159265358979323846;
    for (Index k = 0; k < n; ++k) {
        const double scale = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (Index j = 0; j < n; ++j)
            f(k, j) = scale * std::cos(pi * (2.0 * j + 1.0) * k / (2.0 * n));
    }
    return f;
}

}  // namespace

MatrixXd draw_test_matrix(const TestMatrixSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) throw std::invalid_argument("draw_test_matrix: bad size");
    Rng rng(spec.seed);
    switch (spec.dist) {
        case TestDistribution::gaussian:
            return gaussian_matrix(spec.rows, spec.cols, spec.seed);
        case TestDistribution::orthonormal: {
            if (spec.rows > spec.cols)
                throw std::invalid_argument("draw_test_matrix: orthonormal needs rows <= cols");
            // Orthonormal rows spanning a random subspace.
            return random_orthonormal(spec.cols, spec.rows, spec.seed).transpose();
        }
        case TestDistribution::rademacher: {
            MatrixXd m(spec.rows, spec.cols);
            for (Index j = 0; j < spec.cols; ++j)
                for (Index i = 0; i < spec.rows; ++i) m(i, j) = rng.rademacher();
            return m;
        }
        case TestDistribution::sparse_rademacher: {
            if (spec.sparsity < 1 || spec.sparsity > spec.rows)
                throw std::invalid_argument("draw_test_matrix: sparsity out of range");
            MatrixXd m = MatrixXd::Zero(spec.rows, spec.cols);
            for (Index j = 0; j < spec.cols; ++j) {
                // Choose `sparsity` distinct row positions.
                std::vector<Index> rows(static_cast<std::size_t>(spec.rows));
                std::iota(rows.begin(), rows.end(), Index{0});
                for (Index k = 0; k < spec.sparsity; ++k) {
                    const auto pick = static_cast<std::size_t>(
                        rng.uniform_int(static_cast<std::uint64_t>(rows.size())));
                    m(rows[pick], j) = rng.rademacher();
                    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(pick));
                }
            }
            return m;
        }
        case TestDistribution::srft: {
            if (spec.rows > spec.cols)
                throw std::invalid_argument("draw_test_matrix: srft needs rows <= cols");
            VectorXd d(spec.cols);
            for (Index j = 0; j < spec.cols; ++j) d(j) = rng.rademacher();
            MatrixXd f = dct_matrix(spec.cols);
            // P: sample rows without replacement.
            std::vector<Index> rows(static_cast<std::size_t>(spec.cols));
            std::iota(rows.begin(), rows.end(), Index{0});
            MatrixXd p = MatrixXd::Zero(spec.rows, spec.cols);
            for (Index k = 0; k < spec.rows; ++k) {
                const auto pick = static_cast<std::size_t>(
                    rng.uniform_int(static_cast<std::uint64_t>(rows.size())));
                p(k, rows[pick]) = 1.0;
                rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(pick));
            }
            return p * f * d.asDiagonal();
        }
    }
    throw std::logic_error("draw_test_matrix: unknown distribution");
}

SketchSet sketch(const DenseTensor& t, const std::vector<TestMatrixSpec>& specs) {
    if (static_cast<Index>(specs.size()) != t.order())
        throw std::invalid_argument("sketch: need one spec per mode");
    std::vector<MatrixXd> omegas;
    for (Index n = 0; n < t.order(); ++n) {
        const auto& spec = specs[static_cast<std::size_t>(n)];
        if (spec.cols != t.dim(n))
            throw std::invalid_argument("sketch: spec columns do not match mode " + std::to_string(n));
        omegas.push_back(draw_test_matrix(spec));
    }
    SketchSet out;
    out.specs = specs;
    out.z = t;
    for (Index n = 0; n < t.order(); ++n) out.z = mode_product(out.z, omegas[static_cast<std::size_t>(n)], n);
    for (Index n = 0; n < t.order(); ++n) {
        DenseTensor zn = t;
        for (Index m = 0; m < t.order(); ++m)
            if (m != n) zn = mode_product(zn, omegas[static_cast<std::size_t>(m)], m);
        out.z_leave_one.push_back(std::move(zn));
    }
    return out;
}

TuckerTensor sketch_reconstruct(const SketchSet& s, SketchInfo* info) {
    const Index order = s.z.order();
    if (static_cast<Index>(s.z_leave_one.size()) != order)
        throw std::invalid_argument("sketch_reconstruct: inconsistent sketch set");
    TuckerTensor out;
    out.core = s.z;
    if (info) {
        info->ranks.clear();
        info->rank_deficient = false;
    }
    for (Index n = 0; n < order; ++n) {
        MatrixXd zn = matricize_mode(s.z, n);  // R_n x prod(R_m)
        Eigen::BDCSVD<MatrixXd> svd(zn);
        const VectorXd& sv = svd.singularValues();
        Index rank = 0;
        const double cutoff = (sv.size() ? sv(0) : 0.0) * 1e-12;
        while (rank < sv.size() && sv(rank) > cutoff) ++rank;
        if (info) {
            info->ranks.push_back(rank);
            if (rank < zn.rows()) info->rank_deficient = true;
        }
        out.factors.push_back(matricize_mode(s.z_leave_one[static_cast<std::size_t>(n)], n) *
                              pinv(zn));
    }
    return out;
}

TuckerTensor fstd(const DenseTensor& t, const std::vector<std::vector<Index>>& index_sets,
                  FstdInfo* info) {
    const Index order = t.order();
    if (static_cast<Index>(index_sets.size()) != order)
        throw std::invalid_argument("fstd: need one index set per mode");
    for (Index n = 0; n < order; ++n) {
        if (index_sets[static_cast<std::size_t>(n)].empty())
            throw std::invalid_argument("fstd: empty index set for mode " + std::to_string(n));
        for (Index i : index_sets[static_cast<std::size_t>(n)])
            if (i < 0 || i >= t.dim(n))
                throw std::out_of_range("fstd: index out of range on mode " + std::to_string(n));
    }
    // Selection matrices S_n (P_n x I_n).
    std::vector<MatrixXd> sel;
    for (Index n = 0; n < order; ++n) {
        const auto& p = index_sets[static_cast<std::size_t>(n)];
        MatrixXd s = MatrixXd::Zero(static_cast<Index>(p.size()), t.dim(n));
        for (std::size_t k = 0; k < p.size(); ++k) s(static_cast<Index>(k), p[k]) = 1.0;
        sel.push_back(std::move(s));
    }
    // Intersection subtensor W and its unfolding pseudo-inverses.
    DenseTensor w = t;
    for (Index n = 0; n < order; ++n) w = mode_product(w, sel[static_cast<std::size_t>(n)], n);
    if (info) info->w_condition.clear();
    TuckerTensor out;
    out.core = w;
    std::vector<MatrixXd> w_pinv;
    for (Index n = 0; n < order; ++n) {
        MatrixXd wn = matricize_mode(w, n);
        if (info) {
            Eigen::BDCSVD<MatrixXd> svd(wn);
            const VectorXd& sv = svd.singularValues();
            const double smin = sv(sv.size() - 1);
            info->w_condition.push_back(smin > 0.0 ? sv(0) / smin
                                                   : std::numeric_limits<double>::infinity());
        }
        out.core = mode_product(out.core, pinv(wn), n);
    }
    // Factors: the sampled fibers, i.e. mode-n unfoldings of T restricted in
    // every mode but n.
    for (Index n = 0; n < order; ++n) {
        DenseTensor restricted = t;
        for (Index m = 0; m < order; ++m)
            if (m != n) restricted = mode_product(restricted, sel[static_cast<std::size_t>(m)], m);
        out.factors.push_back(matricize_mode(restricted, n));
    }
    return out;
}

std::vector<std::vector<Index>> fiber_select_maxmod(const DenseTensor& t,
                                                    std::span<const Index> sizes) {
    const Index order = t.order();
    if (static_cast<Index>(sizes.size()) != order)
        throw std::invalid_argument("fiber_select_maxmod: need one size per mode");
    for (Index n = 0; n < order; ++n)
        if (sizes[static_cast<std::size_t>(n)] < 1 || sizes[static_cast<std::size_t>(n)] > t.dim(n))
            throw std::invalid_argument("fiber_select_maxmod: size out of range on mode " +
                                        std::to_string(n));
    std::vector<std::vector<Index>> sets(static_cast<std::size_t>(order));
    DenseTensor resid = t;
    auto complete = [&]() {
        for (Index n = 0; n < order; ++n)
            if (static_cast<Index>(sets[static_cast<std::size_t>(n)].size()) <
                sizes[static_cast<std::size_t>(n)])
                return false;
        return true;
    };
    while (!complete()) {
        // Max-modulus pivot, first occurrence wins.
        Index best_lin = 0;
        double best = -1.0;
        for (Index lin = 0; lin < resid.size(); ++lin) {
            const double v = std::abs(resid[lin]);
            if (v > best) { best = v; best_lin = lin; }
        }
        const auto pivot_idx = multi_index(t.shape(), best_lin);
        bool recorded = false;
        for (Index n = 0; n < order; ++n) {
            auto& set = sets[static_cast<std::size_t>(n)];
            if (static_cast<Index>(set.size()) >= sizes[static_cast<std::size_t>(n)]) continue;
            if (std::find(set.begin(), set.end(), pivot_idx[static_cast<std::size_t>(n)]) ==
                set.end()) {
                set.push_back(pivot_idx[static_cast<std::size_t>(n)]);
                recorded = true;
            }
        }
        const double pivot = resid[best_lin];
        if (pivot != 0.0) {
            // Rank-1 cross deflation: outer product of the pivot's fibers
            // scaled by 1 / pivot^(N-1).
            std::vector<VectorXd> fibers;
            for (Index n = 0; n < order; ++n) {
                VectorXd f(t.dim(n));
                auto idx = pivot_idx;
                for (Index i = 0; i < t.dim(n); ++i) {
                    idx[static_cast<std::size_t>(n)] = i;
                    f(i) = resid.at(idx);
                }
                fibers.push_back(std::move(f));
            }
            const double scale = std::pow(pivot, static_cast<double>(order - 1));
            std::vector<Index> idx(static_cast<std::size_t>(order), 0);
            for (Index lin = 0; lin < resid.size(); ++lin) {
                auto mi = multi_index(t.shape(), lin);
                double cross = 1.0;
                for (Index n = 0; n < order; ++n)
                    cross *= fibers[static_cast<std::size_t>(n)](mi[static_cast<std::size_t>(n)]);
                resid[lin] -= cross / scale;
            }
        } else if (!recorded) {
            // Zero residual and the pivot brought nothing new: fill the open
            // sets with the smallest unused indices.
            for (Index n = 0; n < order; ++n) {
                auto& set = sets[static_cast<std::size_t>(n)];
                for (Index i = 0; static_cast<Index>(set.size()) < sizes[static_cast<std::size_t>(n)] &&
                                  i < t.dim(n);
                     ++i)
                    if (std::find(set.begin(), set.end(), i) == set.end()) set.push_back(i);
            }
        }
    }
    for (auto& s : sets) std::sort(s.begin(), s.end());
    return sets;
}

}  // namespace tnt
