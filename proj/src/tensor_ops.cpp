#include "tnt/tensor_ops.hpp"

#include <algorithm>
#include <numeric>

namespace tnt {

namespace {

void check_mode(const DenseTensor& t, Index n, const char* who) {
    if (n < 0 || n >= t.order())
        throw std::invalid_argument(std::string(who) + ": invalid mode " + std::to_string(n) +
                                    " for order " + std::to_string(t.order()));
}

}  // namespace

DenseTensor permute(const DenseTensor& t, std::span<const Index> perm) {
    const Index n = t.order();
    if (static_cast<Index>(perm.size()) != n)
        throw std::invalid_argument("permute: permutation length mismatch");
    std::vector<Index> seen(static_cast<std::size_t>(n), 0);
    std::vector<Index> out_dims(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) {
        Index p = perm[k];
        if (p < 0 || p >= n || seen[static_cast<std::size_t>(p)]++)
            throw std::invalid_argument("permute: not a permutation");
        out_dims[static_cast<std::size_t>(k)] = t.dim(p);
    }
    DenseTensor out{Shape(out_dims)};
    if (n == 0) {
        out[0] = t[0];
        return out;
    }
    // out(j_0..j_{n-1}) = in(i) with i[perm[k]] = j[k]; walk output little-endian.
    std::vector<Index> in_stride(static_cast<std::size_t>(n), 1);
    for (Index m = 1; m < n; ++m)
        in_stride[static_cast<std::size_t>(m)] = in_stride[static_cast<std::size_t>(m - 1)] * t.dim(m - 1);
    std::vector<Index> j(static_cast<std::size_t>(n), 0);
    Index src = 0;
    for (Index lin = 0; lin < out.size(); ++lin) {
        out[lin] = t[src];
        for (Index k = 0; k < n; ++k) {
            auto ku = static_cast<std::size_t>(k);
            src += in_stride[static_cast<std::size_t>(perm[k])];
            if (++j[ku] < out_dims[ku]) break;
            src -= in_stride[static_cast<std::size_t>(perm[k])] * out_dims[ku];
            j[ku] = 0;
        }
    }
    return out;
}

MatrixXd matricize_mode(const DenseTensor& t, Index n) {
    check_mode(t, n, "matricize_mode");
    const Index rows = t.dim(n);
    const Index cols = t.size() / rows;
    MatrixXd m(rows, cols);
    // Little-endian walk: linear index decomposes as (left, i_n, right) with
    // left the merge of modes < n. Column index = left + right*left_count.
    Index left_count = 1;
    for (Index k = 0; k < n; ++k) left_count *= t.dim(k);
    const Index right_count = cols / left_count;
    Index lin = 0;
    for (Index right = 0; right < right_count; ++right)
        for (Index i = 0; i < rows; ++i)
            for (Index left = 0; left < left_count; ++left)
                m(i, left + right * left_count) = t[lin++];
    return m;
}

DenseTensor unmatricize_mode(const MatrixXd& m, const Shape& shape, Index n) {
    std::vector<Index> dims = shape.dims();
    if (n < 0 || n >= shape.order())
        throw std::invalid_argument("unmatricize_mode: invalid mode");
    dims[static_cast<std::size_t>(n)] = m.rows();
    Shape out_shape{dims};
    if (m.rows() * m.cols() != out_shape.count())
        throw std::invalid_argument("unmatricize_mode: element count mismatch");
    DenseTensor t{out_shape};
    Index left_count = 1;
    for (Index k = 0; k < n; ++k) left_count *= out_shape.dim(k);
    const Index right_count = m.cols() / left_count;
    Index lin = 0;
    for (Index right = 0; right < right_count; ++right)
        for (Index i = 0; i < m.rows(); ++i)
            for (Index left = 0; left < left_count; ++left)
                t[lin++] = m(i, left + right * left_count);
    return t;
}

MatrixXd matricize_canonical(const DenseTensor& t, Index n) {
    if (n < 1 || n > t.order())
        throw std::invalid_argument("matricize_canonical: invalid split " + std::to_string(n));
    Index rows = 1;
    for (Index k = 0; k < n; ++k) rows *= t.dim(k);
    return t.as_matrix(rows, t.size() / rows);
}

DenseTensor mode_product(const DenseTensor& t, const MatrixXd& b, Index n) {
    check_mode(t, n, "mode_product");
    if (b.cols() != t.dim(n))
        throw std::invalid_argument("mode_product: matrix has " + std::to_string(b.cols()) +
                                    " columns, mode " + std::to_string(n) + " has size " +
                                    std::to_string(t.dim(n)));
    MatrixXd folded = b * matricize_mode(t, n);
    return unmatricize_mode(folded, t.shape(), n);
}

DenseTensor mode_product_vec(const DenseTensor& t, const VectorXd& b, Index n) {
    check_mode(t, n, "mode_product_vec");
    if (b.size() != t.dim(n))
        throw std::invalid_argument("mode_product_vec: length mismatch on mode " + std::to_string(n));
    MatrixXd row = b.transpose() * matricize_mode(t, n);  // 1 x rest
    std::vector<Index> dims;
    for (Index k = 0; k < t.order(); ++k)
        if (k != n) dims.push_back(t.dim(k));
    std::vector<double> data(row.data(), row.data() + row.size());
    return DenseTensor(Shape(dims), std::move(data));
}

DenseTensor multilinear_product(const DenseTensor& core, std::span<const MatrixXd> factors) {
    if (static_cast<Index>(factors.size()) != core.order())
        throw std::invalid_argument("multilinear_product: need one factor per mode");
    DenseTensor out = core;
    for (Index n = 0; n < core.order(); ++n) out = mode_product(out, factors[n], n);
    return out;
}

DenseTensor multilinear_product_t(const DenseTensor& t, std::span<const MatrixXd> factors) {
    if (static_cast<Index>(factors.size()) != t.order())
        throw std::invalid_argument("multilinear_product_t: need one factor per mode");
    DenseTensor out = t;
    for (Index n = 0; n < t.order(); ++n) out = mode_product(out, factors[n].transpose(), n);
    return out;
}

DenseTensor multilinear_product_t_skip(const DenseTensor& t, std::span<const MatrixXd> factors,
                                       Index skip) {
    DenseTensor out = t;
    for (Index n = 0; n < t.order(); ++n)
        if (n != skip) out = mode_product(out, factors[n].transpose(), n);
    return out;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::span<const Index> modes_a,
                     std::span<const Index> modes_b) {
    if (modes_a.size() != modes_b.size())
        throw std::invalid_argument("contract: mode lists must pair up");
    for (std::size_t k = 0; k < modes_a.size(); ++k) {
        if (modes_a[k] < 0 || modes_a[k] >= a.order() || modes_b[k] < 0 || modes_b[k] >= b.order())
            throw std::invalid_argument("contract: mode out of range");
        if (a.dim(modes_a[k]) != b.dim(modes_b[k]))
            throw std::invalid_argument("contract: size mismatch in pair " + std::to_string(k));
    }
    // Permute contracted modes of A last / of B first (paired order), then
    // one matrix product does the summation.
    std::vector<Index> perm_a, perm_b, rest_a, rest_b;
    std::vector<bool> used_a(static_cast<std::size_t>(a.order()), false);
    std::vector<bool> used_b(static_cast<std::size_t>(b.order()), false);
    for (Index m : modes_a) used_a[static_cast<std::size_t>(m)] = true;
    for (Index m : modes_b) used_b[static_cast<std::size_t>(m)] = true;
    for (Index m = 0; m < a.order(); ++m)
        if (!used_a[static_cast<std::size_t>(m)]) rest_a.push_back(m);
    for (Index m = 0; m < b.order(); ++m)
        if (!used_b[static_cast<std::size_t>(m)]) rest_b.push_back(m);
    perm_a = rest_a;
    perm_a.insert(perm_a.end(), modes_a.begin(), modes_a.end());
    perm_b.assign(modes_b.begin(), modes_b.end());
    perm_b.insert(perm_b.end(), rest_b.begin(), rest_b.end());

    DenseTensor pa = permute(a, perm_a);
    DenseTensor pb = permute(b, perm_b);
    Index k = 1;
    for (Index m : modes_a) k *= a.dim(m);
    MatrixXd prod = pa.as_matrix(pa.size() / k, k) * pb.as_matrix(k, pb.size() / k);

    std::vector<Index> dims;
    for (Index m : rest_a) dims.push_back(a.dim(m));
    for (Index m : rest_b) dims.push_back(b.dim(m));
    std::vector<double> data(prod.data(), prod.data() + prod.size());
    return DenseTensor(Shape(dims), std::move(data));
}

double inner(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw std::invalid_argument("inner: shape mismatch");
    return a.as_vector().dot(b.as_vector());
}

DenseTensor outer(const DenseTensor& a, const DenseTensor& b) {
    std::vector<Index> dims = a.shape().dims();
    dims.insert(dims.end(), b.shape().dims().begin(), b.shape().dims().end());
    DenseTensor out{Shape(dims)};
    Index lin = 0;
    for (Index jb = 0; jb < b.size(); ++jb)
        for (Index ia = 0; ia < a.size(); ++ia) out[lin++] = a[ia] * b[jb];
    return out;
}

DenseTensor kron(const DenseTensor& a_in, const DenseTensor& b_in) {
    DenseTensor a = a_in, b = b_in;
    // Pad the lower-order operand with trailing singleton modes.
    if (a.order() != b.order()) {
        std::vector<Index> da = a.shape().dims(), db = b.shape().dims();
        while (static_cast<Index>(da.size()) < b.order()) da.push_back(1);
        while (static_cast<Index>(db.size()) < a.order()) db.push_back(1);
        a = reshape(a, Shape(da));
        b = reshape(b, Shape(db));
    }
    const Index n = a.order();
    std::vector<Index> dims(static_cast<std::size_t>(n));
    for (Index m = 0; m < n; ++m) dims[static_cast<std::size_t>(m)] = a.dim(m) * b.dim(m);
    DenseTensor out{Shape(dims)};
    std::vector<Index> ia(static_cast<std::size_t>(n)), ib(static_cast<std::size_t>(n));
    for (Index lin = 0; lin < out.size(); ++lin) {
        Index rem = lin;
        for (Index m = 0; m < n; ++m) {
            Index merged = rem % dims[static_cast<std::size_t>(m)];
            rem /= dims[static_cast<std::size_t>(m)];
            ia[static_cast<std::size_t>(m)] = merged % a.dim(m);
            ib[static_cast<std::size_t>(m)] = merged / a.dim(m);
        }
        out[lin] = a.at(ia) * b.at(ib);
    }
    return out;
}

MatrixXd khatri_rao(const MatrixXd& a, const MatrixXd& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("khatri_rao: column count mismatch");
    MatrixXd c(a.rows() * b.rows(), a.cols());
    for (Index r = 0; r < a.cols(); ++r)
        for (Index j = 0; j < b.rows(); ++j)
            for (Index i = 0; i < a.rows(); ++i) c(i + a.rows() * j, r) = a(i, r) * b(j, r);
    return c;
}

MatrixXd khatri_rao_right(const MatrixXd& a, const MatrixXd& b) {
    return khatri_rao(b, a);
}

MatrixXd khatri_rao_rows(const MatrixXd& a, const MatrixXd& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("khatri_rao_rows: row count mismatch");
    MatrixXd c(a.rows(), a.cols() * b.cols());
    for (Index q = 0; q < b.cols(); ++q)
        for (Index r = 0; r < a.cols(); ++r)
            for (Index i = 0; i < a.rows(); ++i) c(i, r + a.cols() * q) = a(i, r) * b(i, q);
    return c;
}

DenseTensor khatri_rao_tensor(const DenseTensor& a, const DenseTensor& b, Index n) {
    check_mode(a, n, "khatri_rao_tensor");
    if (a.order() != b.order() || a.dim(n) != b.dim(n))
        throw std::invalid_argument("khatri_rao_tensor: shared mode mismatch");
    const Index ord = a.order();
    std::vector<Index> dims(static_cast<std::size_t>(ord));
    for (Index m = 0; m < ord; ++m)
        dims[static_cast<std::size_t>(m)] = (m == n) ? a.dim(n) : a.dim(m) * b.dim(m);
    DenseTensor out{Shape(dims)};
    std::vector<Index> ia(static_cast<std::size_t>(ord)), ib(static_cast<std::size_t>(ord));
    for (Index lin = 0; lin < out.size(); ++lin) {
        Index rem = lin;
        for (Index m = 0; m < ord; ++m) {
            Index merged = rem % dims[static_cast<std::size_t>(m)];
            rem /= dims[static_cast<std::size_t>(m)];
            if (m == n) {
                ia[static_cast<std::size_t>(m)] = merged;
                ib[static_cast<std::size_t>(m)] = merged;
            } else {
                ia[static_cast<std::size_t>(m)] = merged % a.dim(m);
                ib[static_cast<std::size_t>(m)] = merged / a.dim(m);
            }
        }
        out[lin] = a.at(ia) * b.at(ib);
    }
    return out;
}

DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw std::invalid_argument("hadamard: shape mismatch");
    DenseTensor out = a;
    for (Index i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

DenseTensor direct_sum(const DenseTensor& a, const DenseTensor& b) {
    if (a.order() != b.order()) throw std::invalid_argument("direct_sum: order mismatch");
    const Index n = a.order();
    std::vector<Index> dims(static_cast<std::size_t>(n));
    for (Index m = 0; m < n; ++m) dims[static_cast<std::size_t>(m)] = a.dim(m) + b.dim(m);
    DenseTensor out{Shape(dims)};
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index lin = 0; lin < a.size(); ++lin) {
        auto ia = multi_index(a.shape(), lin);
        out.at(ia) = a[lin];
    }
    for (Index lin = 0; lin < b.size(); ++lin) {
        auto ib = multi_index(b.shape(), lin);
        for (Index m = 0; m < n; ++m) idx[static_cast<std::size_t>(m)] = ib[static_cast<std::size_t>(m)] + a.dim(m);
        out.at(idx) = b[lin];
    }
    return out;
}

DenseTensor partial_direct_sum(const DenseTensor& a, const DenseTensor& b, Index n) {
    check_mode(a, n, "partial_direct_sum");
    if (a.order() != b.order() || a.dim(n) != b.dim(n))
        throw std::invalid_argument("partial_direct_sum: shared mode mismatch");
    const Index ord = a.order();
    std::vector<Index> dims(static_cast<std::size_t>(ord));
    for (Index m = 0; m < ord; ++m)
        dims[static_cast<std::size_t>(m)] = (m == n) ? a.dim(n) : a.dim(m) + b.dim(m);
    DenseTensor out{Shape(dims)};
    std::vector<Index> idx(static_cast<std::size_t>(ord));
    for (Index lin = 0; lin < a.size(); ++lin) {
        out.at(multi_index(a.shape(), lin)) = a[lin];
    }
    for (Index lin = 0; lin < b.size(); ++lin) {
        auto ib = multi_index(b.shape(), lin);
        for (Index m = 0; m < ord; ++m)
            idx[static_cast<std::size_t>(m)] =
                (m == n) ? ib[static_cast<std::size_t>(m)] : ib[static_cast<std::size_t>(m)] + a.dim(m);
        out.at(idx) = b[lin];
    }
    return out;
}

DenseTensor concat(const DenseTensor& a, const DenseTensor& b, Index n) {
    check_mode(a, n, "concat");
    if (a.order() != b.order()) throw std::invalid_argument("concat: order mismatch");
    for (Index m = 0; m < a.order(); ++m)
        if (m != n && a.dim(m) != b.dim(m))
            throw std::invalid_argument("concat: mode " + std::to_string(m) + " differs");
    std::vector<Index> dims = a.shape().dims();
    dims[static_cast<std::size_t>(n)] += b.dim(n);
    DenseTensor out{Shape(dims)};
    std::vector<Index> idx(static_cast<std::size_t>(a.order()));
    for (Index lin = 0; lin < a.size(); ++lin) out.at(multi_index(a.shape(), lin)) = a[lin];
    for (Index lin = 0; lin < b.size(); ++lin) {
        auto ib = multi_index(b.shape(), lin);
        idx = ib;
        idx[static_cast<std::size_t>(n)] += a.dim(n);
        out.at(idx) = b[lin];
    }
    return out;
}

DenseTensor convolve(const DenseTensor& a, const DenseTensor& b) {
    if (a.order() != b.order()) throw std::invalid_argument("convolve: order mismatch");
    const Index n = a.order();
    std::vector<Index> dims(static_cast<std::size_t>(n));
    for (Index m = 0; m < n; ++m) dims[static_cast<std::size_t>(m)] = a.dim(m) + b.dim(m) - 1;
    DenseTensor out{Shape(dims)};
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index lb = 0; lb < b.size(); ++lb) {
        auto ib = multi_index(b.shape(), lb);
        for (Index la = 0; la < a.size(); ++la) {
            auto ia = multi_index(a.shape(), la);
            for (Index m = 0; m < n; ++m)
                idx[static_cast<std::size_t>(m)] = ia[static_cast<std::size_t>(m)] + ib[static_cast<std::size_t>(m)];
            out.at(idx) += a[la] * b[lb];
        }
    }
    return out;
}

DenseTensor convolve_mode(const DenseTensor& a, const DenseTensor& b, Index n) {
    check_mode(a, n, "convolve_mode");
    if (a.order() != b.order()) throw std::invalid_argument("convolve_mode: order mismatch");
    const Index ord = a.order();
    std::vector<Index> dims(static_cast<std::size_t>(ord));
    for (Index m = 0; m < ord; ++m)
        dims[static_cast<std::size_t>(m)] = (m == n) ? a.dim(n) + b.dim(n) - 1 : a.dim(m) * b.dim(m);
    DenseTensor out{Shape(dims)};
    std::vector<Index> idx(static_cast<std::size_t>(ord));
    for (Index lb = 0; lb < b.size(); ++lb) {
        auto ib = multi_index(b.shape(), lb);
        for (Index la = 0; la < a.size(); ++la) {
            auto ia = multi_index(a.shape(), la);
            for (Index m = 0; m < ord; ++m) {
                auto mu = static_cast<std::size_t>(m);
                idx[mu] = (m == n) ? ia[mu] + ib[mu] : ia[mu] + a.dim(m) * ib[mu];
            }
            out.at(idx) += a[la] * b[lb];
        }
    }
    return out;
}

DenseTensor tensor_trace(const DenseTensor& a, std::span<const std::pair<Index, Index>> pairs) {
    const Index ord = a.order();
    std::vector<Index> partner(static_cast<std::size_t>(ord), -1);
    for (auto [p, q] : pairs) {
        if (p < 0 || p >= ord || q < 0 || q >= ord || p == q)
            throw std::invalid_argument("tensor_trace: bad mode pair");
        if (partner[static_cast<std::size_t>(p)] != -1 || partner[static_cast<std::size_t>(q)] != -1)
            throw std::invalid_argument("tensor_trace: mode paired twice");
        if (a.dim(p) != a.dim(q))
            throw std::invalid_argument("tensor_trace: size mismatch in pair (" + std::to_string(p) +
                                        "," + std::to_string(q) + ")");
        partner[static_cast<std::size_t>(p)] = q;
        partner[static_cast<std::size_t>(q)] = p;
    }
    std::vector<Index> open;
    for (Index m = 0; m < ord; ++m)
        if (partner[static_cast<std::size_t>(m)] == -1) open.push_back(m);
    std::vector<Index> dims;
    for (Index m : open) dims.push_back(a.dim(m));
    DenseTensor out{Shape(dims)};
    std::vector<Index> oidx(open.size());
    for (Index lin = 0; lin < a.size(); ++lin) {
        auto ia = multi_index(a.shape(), lin);
        bool diag = true;
        for (auto [p, q] : pairs)
            if (ia[static_cast<std::size_t>(p)] != ia[static_cast<std::size_t>(q)]) { diag = false; break; }
        if (!diag) continue;
        for (std::size_t k = 0; k < open.size(); ++k) oidx[k] = ia[static_cast<std::size_t>(open[k])];
        out.at(oidx) += a[lin];
    }
    return out;
}

}  // namespace tnt
