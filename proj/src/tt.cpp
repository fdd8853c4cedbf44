#include "tnt/tt.hpp"

#include <cmath>

#include "tnt/matrix_kernels.hpp"
#include "tnt/tensor_ops.hpp"

namespace tnt {

namespace {

DenseTensor make_core(const MatrixXd& left_unfolding, Index r_left, Index mode, Index r_right) {
    if (left_unfolding.rows() != r_left * mode || left_unfolding.cols() != r_right)
        throw std::invalid_argument("make_core: unfolding shape mismatch");
    std::vector<double> data(left_unfolding.data(), left_unfolding.data() + left_unfolding.size());
    return DenseTensor(Shape{r_left, mode, r_right}, std::move(data));
}

/// New core with left rank mapped through M: out(a,i,r') = sum_r M(a,r) c(r,i,r').
DenseTensor mode_left_mult(const MatrixXd& m, const DenseTensor& c) {
    const Index r = c.dim(0), i = c.dim(1), rp = c.dim(2);
    MatrixXd out = m * c.as_matrix(r, i * rp);
    std::vector<double> data(out.data(), out.data() + out.size());
    return DenseTensor(Shape{m.rows(), i, rp}, std::move(data));
}

/// New core with right rank mapped through M: out(r,i,b) = sum_r' c(r,i,r') M(r',b).
DenseTensor mode_right_mult(const DenseTensor& c, const MatrixXd& m) {
    const Index r = c.dim(0), i = c.dim(1), rp = c.dim(2);
    MatrixXd out = c.as_matrix(r * i, rp) * m;
    std::vector<double> data(out.data(), out.data() + out.size());
    return DenseTensor(Shape{r, i, m.cols()}, std::move(data));
}

/// Truncated SVD that never returns an empty factor: a zero matrix inside a
/// generous budget still yields one (zero) singular direction so tensor
/// shapes stay valid.
SVDResult tsvd_floor1(const MatrixXd& m, double eps_abs, std::optional<Index> max_rank) {
    SVDResult svd = truncated_svd(m, {eps_abs, max_rank});
    if (svd.rank() == 0) {
        svd.U = MatrixXd::Zero(m.rows(), 1);
        svd.U(0, 0) = 1.0;
        svd.S = VectorXd::Zero(1);
        svd.V = MatrixXd::Zero(m.cols(), 1);
        svd.V(0, 0) = 1.0;
        svd.tail_energy = m.squaredNorm();
    }
    return svd;
}

}  // namespace

// --- TTTensor ---------------------------------------------------------------

TTTensor::TTTensor(std::vector<DenseTensor> cores, std::optional<Index> ortho_center)
    : cores_(std::move(cores)), ortho_center_(ortho_center) {
    if (cores_.empty()) throw std::invalid_argument("TTTensor: no cores");
    for (std::size_t n = 0; n < cores_.size(); ++n) {
        if (cores_[n].order() != 3)
            throw std::invalid_argument("TTTensor: core " + std::to_string(n) + " is not order-3");
        if (n + 1 < cores_.size() && cores_[n].dim(2) != cores_[n + 1].dim(0))
            throw std::invalid_argument("TTTensor: rank chain mismatch at core " + std::to_string(n));
    }
    if (cores_.front().dim(0) != 1 || cores_.back().dim(2) != 1)
        throw std::invalid_argument("TTTensor: boundary ranks must be 1");
    if (ortho_center_ && (*ortho_center_ < 0 || *ortho_center_ >= order()))
        throw std::invalid_argument("TTTensor: ortho center out of range");
}

Shape TTTensor::shape() const {
    std::vector<Index> dims;
    dims.reserve(cores_.size());
    for (const auto& c : cores_) dims.push_back(c.dim(1));
    return Shape(dims);
}

std::vector<Index> TTTensor::ranks() const {
    std::vector<Index> r;
    r.reserve(cores_.size() + 1);
    r.push_back(1);
    for (const auto& c : cores_) r.push_back(c.dim(2));
    return r;
}

MatrixXd TTTensor::slice(Index n, Index i) const {
    const DenseTensor& c = core(n);
    return Eigen::Map<const MatrixXd, 0, Eigen::OuterStride<>>(
        c.data().data() + c.dim(0) * i, c.dim(0), c.dim(2),
        Eigen::OuterStride<>(c.dim(0) * c.dim(1)));
}

Eigen::Map<const MatrixXd> TTTensor::left_unfolding(Index n) const {
    const DenseTensor& c = core(n);
    return c.as_matrix(c.dim(0) * c.dim(1), c.dim(2));
}

Eigen::Map<const MatrixXd> TTTensor::right_unfolding(Index n) const {
    const DenseTensor& c = core(n);
    return c.as_matrix(c.dim(0), c.dim(1) * c.dim(2));
}

// --- TTMatrix ---------------------------------------------------------------

TTMatrix::TTMatrix(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw std::invalid_argument("TTMatrix: no cores");
    for (std::size_t n = 0; n < cores_.size(); ++n) {
        if (cores_[n].order() != 4)
            throw std::invalid_argument("TTMatrix: core " + std::to_string(n) + " is not order-4");
        if (n + 1 < cores_.size() && cores_[n].dim(3) != cores_[n + 1].dim(0))
            throw std::invalid_argument("TTMatrix: rank chain mismatch at core " + std::to_string(n));
    }
    if (cores_.front().dim(0) != 1 || cores_.back().dim(3) != 1)
        throw std::invalid_argument("TTMatrix: boundary ranks must be 1");
}

std::vector<Index> TTMatrix::row_dims() const {
    std::vector<Index> d;
    for (const auto& c : cores_) d.push_back(c.dim(1));
    return d;
}

std::vector<Index> TTMatrix::col_dims() const {
    std::vector<Index> d;
    for (const auto& c : cores_) d.push_back(c.dim(2));
    return d;
}

std::vector<Index> TTMatrix::ranks() const {
    std::vector<Index> r{1};
    for (const auto& c : cores_) r.push_back(c.dim(3));
    return r;
}

MatrixXd TTMatrix::slice(Index n, Index i, Index j) const {
    const DenseTensor& c = core(n);
    const Index r = c.dim(0);
    const Index offset = r * (i + c.dim(1) * j);
    return Eigen::Map<const MatrixXd, 0, Eigen::OuterStride<>>(
        c.data().data() + offset, r, c.dim(3),
        Eigen::OuterStride<>(r * c.dim(1) * c.dim(2)));
}

// --- TCTensor ---------------------------------------------------------------

TCTensor::TCTensor(std::vector<DenseTensor> cores) : cores_(std::move(cores)) {
    if (cores_.empty()) throw std::invalid_argument("TCTensor: no cores");
    for (std::size_t n = 0; n < cores_.size(); ++n) {
        if (cores_[n].order() != 3)
            throw std::invalid_argument("TCTensor: core " + std::to_string(n) + " is not order-3");
        const auto& next = cores_[(n + 1) % cores_.size()];
        if (cores_[n].dim(2) != next.dim(0))
            throw std::invalid_argument("TCTensor: rank chain mismatch at core " + std::to_string(n));
    }
}

Shape TCTensor::shape() const {
    std::vector<Index> dims;
    for (const auto& c : cores_) dims.push_back(c.dim(1));
    return Shape(dims);
}

std::vector<Index> TCTensor::ranks() const {
    std::vector<Index> r{cores_.front().dim(0)};
    for (const auto& c : cores_) r.push_back(c.dim(2));
    return r;
}

MatrixXd TCTensor::slice(Index n, Index i) const {
    const DenseTensor& c = core(n);
    return Eigen::Map<const MatrixXd, 0, Eigen::OuterStride<>>(
        c.data().data() + c.dim(0) * i, c.dim(0), c.dim(2),
        Eigen::OuterStride<>(c.dim(0) * c.dim(1)));
}

// --- Evaluation ----------------------------------------------------------------

double tt_eval(const TTTensor& x, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != x.order())
        throw std::invalid_argument("tt_eval: index order mismatch");
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
    for (Index n = 0; n < x.order(); ++n) {
        Index i = idx[static_cast<std::size_t>(n)];
        if (i < 0 || i >= x.core(n).dim(1))
            throw std::out_of_range("tt_eval: index out of range on mode " + std::to_string(n));
        v = v * x.slice(n, i);
    }
    return v(0);
}

DenseTensor tt_full(const TTTensor& x) {
    const Index n_modes = x.order();
    // Accumulate (I_1...I_n) x R_n, extending one core at a time.
    MatrixXd m = x.core(0).as_matrix(x.core(0).dim(1), x.core(0).dim(2));
    for (Index n = 1; n < n_modes; ++n) {
        MatrixXd p = m * x.right_unfolding(n);  // rows x (I_n R_n)
        m = Eigen::Map<const MatrixXd>(p.data(), p.rows() * x.core(n).dim(1), x.core(n).dim(2));
    }
    std::vector<double> data(m.data(), m.data() + m.rows());
    return DenseTensor(x.shape(), std::move(data));
}

double tc_eval(const TCTensor& c, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != c.order())
        throw std::invalid_argument("tc_eval: index order mismatch");
    MatrixXd m = c.slice(0, idx[0]);
    for (Index n = 1; n < c.order(); ++n) m = m * c.slice(n, idx[static_cast<std::size_t>(n)]);
    return m.trace();
}

DenseTensor tc_full(const TCTensor& c) {
    DenseTensor acc = c.core(0);  // (R_0, I_1, R_1)
    for (Index n = 1; n < c.order(); ++n) {
        const Index last = acc.order() - 1;
        acc = contract(acc, c.core(n), std::array<Index, 1>{last}, std::array<Index, 1>{0});
    }
    std::array<std::pair<Index, Index>, 1> pairs{{{0, acc.order() - 1}}};
    return tensor_trace(acc, pairs);
}

MatrixXd mpo_to_matrix(const TTMatrix& a) {
    const auto rd = a.row_dims();
    const auto cd = a.col_dims();
    const Shape rows{std::vector<Index>(rd.begin(), rd.end())};
    const Shape cols{std::vector<Index>(cd.begin(), cd.end())};
    MatrixXd m(rows.count(), cols.count());
    for (Index j = 0; j < m.cols(); ++j) {
        const auto jj = multi_index(cols, j);
        for (Index i = 0; i < m.rows(); ++i) {
            const auto ii = multi_index(rows, i);
            MatrixXd prod = a.slice(0, ii[0], jj[0]);
            for (Index n = 1; n < a.order(); ++n)
                prod = prod * a.slice(n, ii[static_cast<std::size_t>(n)], jj[static_cast<std::size_t>(n)]);
            m(i, j) = prod(0, 0);
        }
    }
    return m;
}

// --- Construction ----------------------------------------------------------------

TTTensor tt_svd(const DenseTensor& t, double eps_abs, std::optional<Index> max_rank) {
    if (eps_abs < 0.0) throw std::invalid_argument("tt_svd: negative budget");
    const Index n_modes = t.order();
    if (n_modes == 0) {
        return TTTensor({DenseTensor(Shape{1, 1, 1}, {t[0]})}, 0);
    }
    if (n_modes == 1) {
        return TTTensor({reshape(t, Shape{1, t.dim(0), 1})}, 0);
    }
    const double delta = eps_abs / std::sqrt(static_cast<double>(n_modes - 1));
    std::vector<DenseTensor> cores;
    cores.reserve(static_cast<std::size_t>(n_modes));
    Index r_left = 1;
    MatrixXd m = t.as_matrix(t.dim(0), t.size() / t.dim(0));
    for (Index n = 0; n < n_modes - 1; ++n) {
        SVDResult svd = tsvd_floor1(m, delta, max_rank);
        const Index rank = svd.rank();
        cores.push_back(make_core(svd.U, r_left, t.dim(n), rank));
        MatrixXd rest = svd.S.asDiagonal() * svd.V.transpose();  // rank x cols
        const Index next_rows = rank * t.dim(n + 1);
        m = Eigen::Map<const MatrixXd>(rest.data(), next_rows,
                                       rest.rows() * rest.cols() / next_rows);
        r_left = rank;
    }
    cores.push_back(make_core(m, r_left, t.dim(n_modes - 1), 1));
    return TTTensor(std::move(cores), n_modes - 1);
}

TTTensor tt_lrmf(const DenseTensor& t, const LrmfCallback& lrmf, double eps_abs) {
    const Index n_modes = t.order();
    if (n_modes <= 1) return tt_svd(t, eps_abs);
    const double delta = eps_abs / std::sqrt(static_cast<double>(n_modes - 1));
    std::vector<DenseTensor> cores;
    Index r_left = 1;
    MatrixXd m = t.as_matrix(t.dim(0), t.size() / t.dim(0));
    for (Index n = 0; n < n_modes - 1; ++n) {
        LrmfSplit split;
        try {
            split = lrmf(m, delta);
        } catch (const std::exception& e) {
            throw std::runtime_error("tt_lrmf: factorization failed at mode " + std::to_string(n) +
                                     ": " + e.what());
        }
        if (split.A.rows() != m.rows() || split.B.rows() != m.cols() ||
            split.A.cols() != split.B.cols() || split.A.cols() < 1)
            throw std::runtime_error("tt_lrmf: callback returned inconsistent factors at mode " +
                                     std::to_string(n));
        const Index rank = split.A.cols();
        cores.push_back(make_core(split.A, r_left, t.dim(n), rank));
        MatrixXd rest = split.B.transpose();
        const Index next_rows = rank * t.dim(n + 1);
        m = Eigen::Map<const MatrixXd>(rest.data(), next_rows,
                                       rest.rows() * rest.cols() / next_rows);
        r_left = rank;
    }
    cores.push_back(make_core(m, r_left, t.dim(n_modes - 1), 1));
    return TTTensor(std::move(cores));
}

namespace {

Index tucker2_split_steps(Index n_modes) {
    Index steps = 0;
    Index span = n_modes;
    while (span > 2) { ++steps; span -= 2; }
    if (span == 2) ++steps;
    return steps;
}

/// Recursive worker: d holds the sub-chain [l, r] as a 3rd-order tensor
/// (R_l_in * I_l, I_r * R_r_in, middle), writes cores l..r.
void tt_tucker2_recurse(const DenseTensor& d, Index l, Index r, Index rl_in, Index rr_in,
                        double step_eps, std::vector<DenseTensor>& cores,
                        const std::vector<Index>& dims) {
    const Index il = dims[static_cast<std::size_t>(l)];
    const Index ir = dims[static_cast<std::size_t>(r)];
    if (r - l == 1) {
        MatrixXd m = d.as_matrix(rl_in * il, ir * rr_in);
        SVDResult svd = tsvd_floor1(m, step_eps, std::nullopt);
        cores[static_cast<std::size_t>(l)] = make_core(svd.U, rl_in, il, svd.rank());
        MatrixXd rest = svd.S.asDiagonal() * svd.V.transpose();  // rank x (ir*rr)
        // (rank, ir, rr) from the row-index-fastest layout of rest^T.
        MatrixXd rest_t = rest;  // rank x (ir*rr), column-major: rank fastest
        std::vector<double> data(rest_t.data(), rest_t.data() + rest_t.size());
        cores[static_cast<std::size_t>(r)] = DenseTensor(Shape{svd.rank(), ir, rr_in}, std::move(data));
        return;
    }
    Tucker2Result t2 = tucker2(d, step_eps);
    const Index r1 = t2.A.cols();
    const Index r2 = t2.B.cols();
    cores[static_cast<std::size_t>(l)] = make_core(t2.A, rl_in, il, r1);
    // B is (I_r * R_r_in) x r2; core r is (r2, I_r, R_r_in).
    DenseTensor bt = permute(reshape(from_matrix(t2.B), Shape{ir, rr_in, r2}),
                             std::array<Index, 3>{2, 0, 1});
    cores[static_cast<std::size_t>(r)] = std::move(bt);
    if (r - l == 2) {
        // One middle mode: the Tucker-2 core becomes the middle TT core.
        cores[static_cast<std::size_t>(l + 1)] =
            permute(t2.core, std::array<Index, 3>{0, 2, 1});
        return;
    }
    // Re-group the Tucker-2 core (r1, r2, I_{l+1} x ... x I_{r-1}) for the
    // next level: (r1 * I_{l+1}, I_{r-1} * r2, middle).
    std::vector<Index> expanded{r1, r2};
    for (Index k = l + 1; k <= r - 1; ++k) expanded.push_back(dims[static_cast<std::size_t>(k)]);
    DenseTensor g = reshape(t2.core, Shape(expanded));
    std::vector<Index> perm{0, 2, static_cast<Index>(expanded.size()) - 1, 1};
    for (Index k = 3; k < static_cast<Index>(expanded.size()) - 1; ++k) perm.push_back(k);
    DenseTensor gp = permute(g, perm);
    Index middle = 1;
    for (Index k = l + 2; k <= r - 2; ++k) middle *= dims[static_cast<std::size_t>(k)];
    DenseTensor next = reshape(gp, Shape{r1 * dims[static_cast<std::size_t>(l + 1)],
                                         dims[static_cast<std::size_t>(r - 1)] * r2, middle});
    tt_tucker2_recurse(next, l + 1, r - 1, r1, r2, step_eps, cores, dims);
}

}  // namespace

TTTensor tt_via_tucker2(const DenseTensor& t, double eps_abs) {
    const Index n_modes = t.order();
    if (n_modes <= 2) return tt_svd(t, eps_abs);
    const Index steps = tucker2_split_steps(n_modes);
    const double step_eps = eps_abs / std::sqrt(static_cast<double>(steps));
    const auto& dims = t.shape().dims();
    // (I_0, I_{N-1}, middle) regrouping of the input.
    std::vector<Index> perm{0, n_modes - 1};
    for (Index k = 1; k < n_modes - 1; ++k) perm.push_back(k);
    DenseTensor d = permute(t, perm);
    Index middle = 1;
    for (Index k = 1; k < n_modes - 1; ++k) middle *= dims[static_cast<std::size_t>(k)];
    d = reshape(d, Shape{t.dim(0), t.dim(n_modes - 1), middle});
    std::vector<DenseTensor> cores(static_cast<std::size_t>(n_modes));
    tt_tucker2_recurse(d, 0, n_modes - 1, 1, 1, step_eps, cores, dims);
    return TTTensor(std::move(cores));
}

TTTensor cp_to_tt(const KruskalTensor& k) {
    k.validate();
    const Index n_modes = k.order();
    const Index rank = k.rank();
    if (n_modes == 0) throw std::invalid_argument("cp_to_tt: order-0 input");
    std::vector<DenseTensor> cores;
    if (n_modes == 1) {
        VectorXd v = k.factors[0] * k.weights;
        cores.push_back(make_core(v, 1, v.size(), 1));
        return TTTensor(std::move(cores));
    }
    cores.push_back(make_core(k.factors[0], 1, k.factors[0].rows(), rank));
    for (Index n = 1; n < n_modes - 1; ++n) {
        const MatrixXd& f = k.factors[static_cast<std::size_t>(n)];
        DenseTensor core{Shape{rank, f.rows(), rank}};
        for (Index i = 0; i < f.rows(); ++i)
            for (Index r = 0; r < rank; ++r) core({r, i, r}) = f(i, r);
        cores.push_back(std::move(core));
    }
    const MatrixXd& last = k.factors[static_cast<std::size_t>(n_modes - 1)];
    DenseTensor tail{Shape{rank, last.rows(), 1}};
    for (Index i = 0; i < last.rows(); ++i)
        for (Index r = 0; r < rank; ++r) tail({r, i, 0}) = k.weights(r) * last(i, r);
    cores.push_back(std::move(tail));
    return TTTensor(std::move(cores));
}

TTTensor tc_to_tt(const TCTensor& c, double eps_abs) {
    const Index n_modes = c.order();
    const Index loop = c.core(0).dim(0);
    if (loop == 1) {
        std::vector<DenseTensor> cores(c.cores().begin(), c.cores().end());
        return TTTensor(std::move(cores));
    }
    if (n_modes == 1) {
        // Single ring core: the represented vector is the slice-trace.
        std::array<std::pair<Index, Index>, 1> pairs{{{0, 2}}};
        DenseTensor v = tensor_trace(c.core(0), pairs);
        return TTTensor({reshape(v, Shape{1, v.dim(0), 1})});
    }
    const double delta = eps_abs / std::sqrt(static_cast<double>(n_modes - 1));
    std::vector<DenseTensor> cores(static_cast<std::size_t>(n_modes));

    // First split: isolate I_1 from the loop leg.
    DenseTensor b = permute(c.core(0), std::array<Index, 3>{1, 0, 2});  // (I_1, L, R_1)
    SVDResult svd = tsvd_floor1(b.as_matrix(c.core(0).dim(1), loop * c.core(0).dim(2)), delta,
                                std::nullopt);
    cores[0] = make_core(svd.U, 1, c.core(0).dim(1), svd.rank());
    MatrixXd rest = svd.S.asDiagonal() * svd.V.transpose();
    DenseTensor carry = reshape(from_matrix(rest), Shape{svd.rank(), loop, c.core(0).dim(2)});

    for (Index n = 1; n < n_modes - 1; ++n) {
        // carry (k, L, R_n) joins core n (R_n, I_{n+1}, R_{n+1}).
        DenseTensor d = contract(carry, c.core(n), std::array<Index, 1>{2}, std::array<Index, 1>{0});
        // d is (k, L, I, R'); split rows (k, I) from cols (L, R').
        DenseTensor dp = permute(d, std::array<Index, 4>{0, 2, 1, 3});
        const Index k = carry.dim(0), in = c.core(n).dim(1), rp = c.core(n).dim(2);
        SVDResult s = tsvd_floor1(dp.as_matrix(k * in, loop * rp), delta, std::nullopt);
        cores[static_cast<std::size_t>(n)] = make_core(s.U, k, in, s.rank());
        MatrixXd vt = s.S.asDiagonal() * s.V.transpose();
        carry = reshape(from_matrix(vt), Shape{s.rank(), loop, rp});
    }
    // Close the loop: contract carry (k, L, R_{N-1}) with the last ring core
    // (R_{N-1}, I_N, L) over both the bond and the loop leg.
    DenseTensor tail = contract(carry, c.core(n_modes - 1), std::array<Index, 2>{1, 2},
                                std::array<Index, 2>{2, 0});
    cores[static_cast<std::size_t>(n_modes - 1)] = reshape(tail, Shape{tail.dim(0), tail.dim(1), 1});
    return TTTensor(std::move(cores));
}

TTMatrix mpo_from_matrix(const MatrixXd& m, std::span<const Index> row_dims,
                         std::span<const Index> col_dims, double eps_abs) {
    if (row_dims.size() != col_dims.size())
        throw std::invalid_argument("mpo_from_matrix: factor count mismatch");
    const Index n_modes = static_cast<Index>(row_dims.size());
    std::vector<Index> dims(row_dims.begin(), row_dims.end());
    dims.insert(dims.end(), col_dims.begin(), col_dims.end());
    Shape expanded{dims};
    if (expanded.count() != m.rows() * m.cols())
        throw std::invalid_argument("mpo_from_matrix: dimension products mismatch");
    DenseTensor t = reshape(from_matrix(m), expanded);
    // Interleave (i_1, j_1, i_2, j_2, ...) then merge each pair.
    std::vector<Index> perm;
    for (Index k = 0; k < n_modes; ++k) {
        perm.push_back(k);
        perm.push_back(k + n_modes);
    }
    DenseTensor ti = permute(t, perm);
    std::vector<Index> merged;
    for (Index k = 0; k < n_modes; ++k)
        merged.push_back(row_dims[static_cast<std::size_t>(k)] * col_dims[static_cast<std::size_t>(k)]);
    TTTensor tt = tt_svd(reshape(ti, Shape(merged)), eps_abs);
    std::vector<DenseTensor> cores;
    for (Index n = 0; n < n_modes; ++n) {
        const DenseTensor& c = tt.core(n);
        cores.push_back(reshape(c, Shape{c.dim(0), row_dims[static_cast<std::size_t>(n)],
                                         col_dims[static_cast<std::size_t>(n)], c.dim(2)}));
    }
    return TTMatrix(std::move(cores));
}

TTMatrix mpo_identity(std::span<const Index> dims) {
    std::vector<DenseTensor> cores;
    for (Index d : dims) {
        DenseTensor c{Shape{1, d, d, 1}};
        for (Index i = 0; i < d; ++i) c({0, i, i, 0}) = 1.0;
        cores.push_back(std::move(c));
    }
    return TTMatrix(std::move(cores));
}

// --- Orthogonalization, rounding -----------------------------------------------

TTTensor tt_orthogonalize(const TTTensor& x, Index n) {
    if (n < 0 || n >= x.order())
        throw std::invalid_argument("tt_orthogonalize: center out of range");
    TTTensor y = x;
    for (Index m = 0; m < n; ++m) {
        auto [q, r] = thin_qr(y.left_unfolding(m));
        y.core(m) = make_core(q, y.core(m).dim(0), y.core(m).dim(1), q.cols());
        y.core(m + 1) = mode_left_mult(r, y.core(m + 1));
    }
    for (Index m = x.order() - 1; m > n; --m) {
        auto [l, q] = thin_lq(y.right_unfolding(m));
        std::vector<double> data(q.data(), q.data() + q.size());
        y.core(m) = DenseTensor(Shape{q.rows(), y.core(m).dim(1), y.core(m).dim(2)},
                                std::move(data));
        y.core(m - 1) = mode_right_mult(y.core(m - 1), l);
    }
    y.set_ortho_center(n);
    return y;
}

TTTensor tt_round(const TTTensor& x, double eps_rel, std::optional<Index> max_rank) {
    if (eps_rel < 0.0) throw std::invalid_argument("tt_round: negative tolerance");
    const Index n_modes = x.order();
    TTTensor y = tt_orthogonalize(x, n_modes - 1);
    if (n_modes == 1) return y;
    const double delta = eps_rel / std::sqrt(static_cast<double>(n_modes - 1));
    for (Index n = n_modes - 1; n >= 1; --n) {
        MatrixXd m = y.right_unfolding(n);
        SVDResult svd = tsvd_floor1(m, delta * m.norm(), max_rank);
        const Index rank = svd.rank();
        MatrixXd vt = svd.V.transpose();  // rank x (I_n R_n)
        std::vector<double> data(vt.data(), vt.data() + vt.size());
        y.core(n) = DenseTensor(Shape{rank, y.core(n).dim(1), y.core(n).dim(2)}, std::move(data));
        y.core(n - 1) = mode_right_mult(y.core(n - 1), svd.U * svd.S.asDiagonal());
    }
    y.set_ortho_center(0);
    return y;
}

// --- ASCU ------------------------------------------------------------------------

namespace {

/// X-hat^{>n}: the right interface tensor (R_n, I_{n+1}, ..., I_{N-1}).
DenseTensor tt_right_part(const TTTensor& x, Index n) {
    DenseTensor w(Shape{1});
    w[0] = 1.0;
    for (Index m = x.order() - 1; m > n; --m)
        w = contract(x.core(m), w, std::array<Index, 1>{2}, std::array<Index, 1>{0});
    return w;
}

/// L^{<n+1}-style contraction: T's modes 0..n-1 against the left interface.
/// Result shape (R_{n-1}, I_n, ..., I_{N-1}).
DenseTensor tt_left_contraction(const DenseTensor& t, const TTTensor& x, Index n) {
    std::vector<Index> dims{1};
    for (Index d : t.shape().dims()) dims.push_back(d);
    DenseTensor l = reshape(t, Shape(dims));
    for (Index m = 0; m < n; ++m)
        l = contract(x.core(m), l, std::array<Index, 2>{0, 1}, std::array<Index, 2>{0, 1});
    return l;
}

DenseTensor ascu_contracted_core(const DenseTensor& l, const DenseTensor& w) {
    const Index trailing = w.order() - 1;
    std::vector<Index> ma, mb;
    for (Index k = 0; k < trailing; ++k) {
        ma.push_back(2 + k);
        mb.push_back(1 + k);
    }
    return contract(l, w, ma, mb);  // (R_{n-1}, I_n, R_n)
}

}  // namespace

TTTensor ascu(const DenseTensor& t, double eps_abs, AscuVariant variant, const AscuOptions& opts) {
    if (eps_abs < 0.0) throw std::invalid_argument("ascu: negative budget");
    const Index n_modes = t.order();
    TTTensor xhat = opts.init ? *opts.init : tt_svd(t, eps_abs);
    if (xhat.shape() != t.shape()) throw std::invalid_argument("ascu: init shape mismatch");
    if (n_modes <= 1) return xhat;

    const double x_sq = t.norm() * t.norm();
    xhat = tt_orthogonalize(xhat, 0);
    double prev_err = std::numeric_limits<double>::infinity();

    for (Index sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        // Forward pass: centers 0 .. N-2.
        for (Index n = 0; n < n_modes - 1; ++n) {
            DenseTensor l = tt_left_contraction(t, xhat, n);
            DenseTensor c = ascu_contracted_core(l, tt_right_part(xhat, n));
            const double c_sq = c.norm() * c.norm();
            const double eps_n = std::sqrt(std::max(0.0, eps_abs * eps_abs - x_sq + c_sq));
            if (variant == AscuVariant::one_side) {
                MatrixXd m = c.as_matrix(c.dim(0) * c.dim(1), c.dim(2));
                SVDResult svd = tsvd_floor1(m, eps_n, std::nullopt);
                xhat.core(n) = make_core(svd.U, c.dim(0), c.dim(1), svd.rank());
                xhat.core(n + 1) =
                    mode_left_mult(svd.S.asDiagonal() * svd.V.transpose(), xhat.core(n + 1));
            } else {
                DenseTensor cp = permute(c, std::array<Index, 3>{0, 2, 1});
                Tucker2Result t2 = tucker2(cp, eps_n, {opts.tucker2_sweeps, 1e-10});
                DenseTensor middle = permute(t2.core, std::array<Index, 3>{0, 2, 1});
                if (n == 0)
                    middle = mode_left_mult(t2.A, middle);
                else
                    xhat.core(n - 1) = mode_right_mult(xhat.core(n - 1), t2.A);
                xhat.core(n + 1) = mode_left_mult(t2.B.transpose(), xhat.core(n + 1));
                xhat.core(n) = std::move(middle);
                // Left-orthogonalize the fresh core.
                auto [q, rfac] = thin_qr(xhat.left_unfolding(n));
                xhat.core(n) = make_core(q, xhat.core(n).dim(0), xhat.core(n).dim(1), q.cols());
                xhat.core(n + 1) = mode_left_mult(rfac, xhat.core(n + 1));
            }
            xhat.set_ortho_center(n + 1);
        }
        // Backward pass: centers N-1 .. 1.
        for (Index n = n_modes - 1; n >= 1; --n) {
            DenseTensor l = tt_left_contraction(t, xhat, n);
            DenseTensor c = ascu_contracted_core(l, tt_right_part(xhat, n));
            const double c_sq = c.norm() * c.norm();
            const double eps_n = std::sqrt(std::max(0.0, eps_abs * eps_abs - x_sq + c_sq));
            if (variant == AscuVariant::one_side) {
                MatrixXd m = c.as_matrix(c.dim(0), c.dim(1) * c.dim(2));
                SVDResult svd = tsvd_floor1(m, eps_n, std::nullopt);
                MatrixXd vt = svd.V.transpose();
                std::vector<double> data(vt.data(), vt.data() + vt.size());
                xhat.core(n) = DenseTensor(Shape{svd.rank(), c.dim(1), c.dim(2)}, std::move(data));
                xhat.core(n - 1) = mode_right_mult(xhat.core(n - 1), svd.U * svd.S.asDiagonal());
            } else {
                DenseTensor cp = permute(c, std::array<Index, 3>{0, 2, 1});
                Tucker2Result t2 = tucker2(cp, eps_n, {opts.tucker2_sweeps, 1e-10});
                DenseTensor middle = permute(t2.core, std::array<Index, 3>{0, 2, 1});
                if (n == n_modes - 1)
                    middle = mode_right_mult(middle, t2.B.transpose());
                else
                    xhat.core(n + 1) = mode_left_mult(t2.B.transpose(), xhat.core(n + 1));
                xhat.core(n - 1) = mode_right_mult(xhat.core(n - 1), t2.A);
                xhat.core(n) = std::move(middle);
                // Right-orthogonalize the fresh core.
                auto [lfac, q] = thin_lq(xhat.right_unfolding(n));
                std::vector<double> data(q.data(), q.data() + q.size());
                xhat.core(n) = DenseTensor(Shape{q.rows(), xhat.core(n).dim(1), xhat.core(n).dim(2)},
                                           std::move(data));
                xhat.core(n - 1) = mode_right_mult(xhat.core(n - 1), lfac);
            }
            xhat.set_ortho_center(n - 1);
        }
        const double err = (t.as_vector() - tt_full(xhat).as_vector()).norm();
        if (std::abs(prev_err - err) <= 1e-12 * std::max(1.0, t.norm())) break;
        prev_err = err;
    }
    return xhat;
}

// --- Compressed arithmetic ----------------------------------------------------

namespace {

void check_tt_same_shape(const TTTensor& x, const TTTensor& y, const char* who) {
    if (x.shape() != y.shape()) throw std::invalid_argument(std::string(who) + ": shape mismatch");
}

}  // namespace

TTTensor tt_add(const TTTensor& x, const TTTensor& y) {
    check_tt_same_shape(x, y, "tt_add");
    const Index n_modes = x.order();
    if (n_modes == 1) {
        DenseTensor c = x.core(0);
        for (Index i = 0; i < c.size(); ++i) c[i] += y.core(0)[i];
        return TTTensor({std::move(c)});
    }
    std::vector<DenseTensor> cores;
    for (Index n = 0; n < n_modes; ++n) {
        const DenseTensor& cx = x.core(n);
        const DenseTensor& cy = y.core(n);
        const Index rl = (n == 0) ? 1 : cx.dim(0) + cy.dim(0);
        const Index rr = (n == n_modes - 1) ? 1 : cx.dim(2) + cy.dim(2);
        const Index row_off = (n == 0) ? 0 : cx.dim(0);
        const Index col_off = (n == n_modes - 1) ? 0 : cx.dim(2);
        DenseTensor c{Shape{rl, cx.dim(1), rr}};
        for (Index rp = 0; rp < cx.dim(2); ++rp)
            for (Index i = 0; i < cx.dim(1); ++i)
                for (Index r = 0; r < cx.dim(0); ++r) c({r, i, rp}) = cx({r, i, rp});
        for (Index rp = 0; rp < cy.dim(2); ++rp)
            for (Index i = 0; i < cy.dim(1); ++i)
                for (Index r = 0; r < cy.dim(0); ++r)
                    c({r + row_off, i, rp + col_off}) = cy({r, i, rp});
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTTensor tt_hadamard(const TTTensor& x, const TTTensor& y) {
    check_tt_same_shape(x, y, "tt_hadamard");
    std::vector<DenseTensor> cores;
    for (Index n = 0; n < x.order(); ++n) {
        const DenseTensor& cx = x.core(n);
        const DenseTensor& cy = y.core(n);
        DenseTensor c{Shape{cx.dim(0) * cy.dim(0), cx.dim(1), cx.dim(2) * cy.dim(2)}};
        for (Index qp = 0; qp < cy.dim(2); ++qp)
            for (Index rp = 0; rp < cx.dim(2); ++rp)
                for (Index i = 0; i < cx.dim(1); ++i)
                    for (Index q = 0; q < cy.dim(0); ++q)
                        for (Index r = 0; r < cx.dim(0); ++r)
                            c({r + cx.dim(0) * q, i, rp + cx.dim(2) * qp}) =
                                cx({r, i, rp}) * cy({q, i, qp});
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTTensor tt_kron(const TTTensor& x, const TTTensor& y) {
    std::vector<DenseTensor> cores = x.cores();
    cores.insert(cores.end(), y.cores().begin(), y.cores().end());
    return TTTensor(std::move(cores));
}

TTTensor tt_mode_matrix(const TTTensor& x, const MatrixXd& a, Index n) {
    if (n < 0 || n >= x.order()) throw std::invalid_argument("tt_mode_matrix: invalid mode");
    TTTensor y = x;
    y.core(n) = mode_product(y.core(n), a, 1);
    y.set_ortho_center(std::nullopt);
    return y;
}

TTTensor tt_convolve(const TTTensor& x, const TTTensor& y) {
    if (x.order() != y.order()) throw std::invalid_argument("tt_convolve: order mismatch");
    std::vector<DenseTensor> cores;
    for (Index n = 0; n < x.order(); ++n) {
        const DenseTensor& cx = x.core(n);
        const DenseTensor& cy = y.core(n);
        DenseTensor c{Shape{cx.dim(0) * cy.dim(0), cx.dim(1) + cy.dim(1) - 1,
                            cx.dim(2) * cy.dim(2)}};
        for (Index qp = 0; qp < cy.dim(2); ++qp)
            for (Index rp = 0; rp < cx.dim(2); ++rp)
                for (Index j = 0; j < cy.dim(1); ++j)
                    for (Index i = 0; i < cx.dim(1); ++i)
                        for (Index q = 0; q < cy.dim(0); ++q)
                            for (Index r = 0; r < cx.dim(0); ++r)
                                c({r + cx.dim(0) * q, i + j, rp + cx.dim(2) * qp}) +=
                                    cx({r, i, rp}) * cy({q, j, qp});
        cores.push_back(std::move(c));
    }
    return TTTensor(std::move(cores));
}

TTTensor tt_modewise_transform(const TTTensor& x, std::span<const MatrixXd> maps) {
    if (static_cast<Index>(maps.size()) != x.order())
        throw std::invalid_argument("tt_modewise_transform: need one map per mode");
    std::vector<DenseTensor> cores;
    for (Index n = 0; n < x.order(); ++n)
        cores.push_back(mode_product(x.core(n), maps[static_cast<std::size_t>(n)], 1));
    return TTTensor(std::move(cores));
}

double tt_inner(const TTTensor& x, const TTTensor& y) {
    check_tt_same_shape(x, y, "tt_inner");
    MatrixXd s = MatrixXd::Ones(1, 1);
    for (Index n = 0; n < x.order(); ++n) {
        const Index in = x.core(n).dim(1);
        MatrixXd z = s * y.right_unfolding(n);  // R^x_{n-1} x (I_n R^y_n)
        Eigen::Map<const MatrixXd> z2(z.data(), s.rows() * in, y.core(n).dim(2));
        s = x.left_unfolding(n).transpose() * z2;  // R^x_n x R^y_n
    }
    return s(0, 0);
}

double tt_norm(const TTTensor& x) {
    if (x.ortho_center()) return x.core(*x.ortho_center()).norm();
    return tt_orthogonalize(x, 0).core(0).norm();
}

TTTensor mpo_apply(const TTMatrix& a, const TTTensor& x, std::optional<double> fuse_eps) {
    if (a.col_dims() != x.shape().dims())
        throw std::invalid_argument("mpo_apply: operator column dims do not match operand");
    std::vector<DenseTensor> cores;
    for (Index n = 0; n < a.order(); ++n) {
        const DenseTensor& ca = a.core(n);
        const DenseTensor& cx = x.core(n);
        const Index p = ca.dim(0), ip = ca.dim(1), jp = ca.dim(2), pp = ca.dim(3);
        const Index r = cx.dim(0), rp = cx.dim(2);
        DenseTensor c{Shape{p * r, ip, pp * rp}};
        for (Index b2 = 0; b2 < rp; ++b2)
            for (Index a2 = 0; a2 < pp; ++a2)
                for (Index i = 0; i < ip; ++i)
                    for (Index b1 = 0; b1 < r; ++b1)
                        for (Index a1 = 0; a1 < p; ++a1) {
                            double sum = 0.0;
                            for (Index j = 0; j < jp; ++j)
                                sum += ca({a1, i, j, a2}) * cx({b1, j, b2});
                            c({a1 + p * b1, i, a2 + pp * b2}) = sum;
                        }
        cores.push_back(std::move(c));
    }
    TTTensor y{std::move(cores)};
    if (fuse_eps) y = tt_round(y, *fuse_eps);
    return y;
}

TTMatrix mpo_matmat(const TTMatrix& a, const TTMatrix& x, std::optional<double> fuse_eps) {
    if (a.col_dims() != x.row_dims())
        throw std::invalid_argument("mpo_matmat: inner dims do not chain");
    std::vector<DenseTensor> cores;
    for (Index n = 0; n < a.order(); ++n) {
        const DenseTensor& ca = a.core(n);
        const DenseTensor& cx = x.core(n);
        const Index p = ca.dim(0), ip = ca.dim(1), jp = ca.dim(2), pp = ca.dim(3);
        const Index r = cx.dim(0), kp = cx.dim(2), rp = cx.dim(3);
        DenseTensor c{Shape{p * r, ip, kp, pp * rp}};
        for (Index b2 = 0; b2 < rp; ++b2)
            for (Index a2 = 0; a2 < pp; ++a2)
                for (Index k = 0; k < kp; ++k)
                    for (Index i = 0; i < ip; ++i)
                        for (Index b1 = 0; b1 < r; ++b1)
                            for (Index a1 = 0; a1 < p; ++a1) {
                                double sum = 0.0;
                                for (Index j = 0; j < jp; ++j)
                                    sum += ca({a1, i, j, a2}) * cx({b1, j, k, b2});
                                c({a1 + p * b1, i, k, a2 + pp * b2}) = sum;
                            }
        cores.push_back(std::move(c));
    }
    TTMatrix y{std::move(cores)};
    if (fuse_eps) return mpo_round(y, *fuse_eps);
    return y;
}

TTMatrix mpo_round(const TTMatrix& a, double eps_rel, std::optional<Index> max_rank) {
    std::vector<DenseTensor> merged;
    for (Index n = 0; n < a.order(); ++n) {
        const DenseTensor& c = a.core(n);
        merged.push_back(reshape(c, Shape{c.dim(0), c.dim(1) * c.dim(2), c.dim(3)}));
    }
    TTTensor rounded = tt_round(TTTensor(std::move(merged)), eps_rel, max_rank);
    std::vector<DenseTensor> back;
    for (Index n = 0; n < a.order(); ++n) {
        const DenseTensor& c = rounded.core(n);
        back.push_back(reshape(c, Shape{c.dim(0), a.core(n).dim(1), a.core(n).dim(2), c.dim(2)}));
    }
    return TTMatrix(std::move(back));
}

double mpo_quadratic(const TTMatrix& a, const TTTensor& x) {
    return tt_inner(x, mpo_apply(a, x));
}

TTStats tt_stats(const TTTensor& x) {
    TTStats s;
    s.ranks = x.ranks();
    s.param_count = 0;
    for (Index n = 0; n < x.order(); ++n) s.param_count += x.core(n).size();
    s.compression_ratio = static_cast<double>(x.shape().count()) /
                          static_cast<double>(s.param_count);
    return s;
}

}  // namespace tnt
