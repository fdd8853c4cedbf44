#include "tnt/cp.hpp"

#include <cmath>

#include "tnt/matrix_kernels.hpp"
#include "tnt/rng.hpp"
#include "tnt/tensor_ops.hpp"

namespace tnt {

void KruskalTensor::validate() const {
    for (const auto& f : factors)
        if (f.cols() != rank())
            throw std::invalid_argument("KruskalTensor: factor column count differs from rank");
    if (normalized) {
        for (const auto& f : factors)
            for (Index r = 0; r < f.cols(); ++r)
                if (std::abs(f.col(r).norm() - 1.0) > 1e-10)
                    throw std::invalid_argument("KruskalTensor: normalized flag set but column norm != 1");
    }
}

MatrixXd khatri_rao_all(const std::vector<MatrixXd>& factors, Index skip) {
    MatrixXd k;
    bool first = true;
    for (Index n = 0; n < static_cast<Index>(factors.size()); ++n) {
        if (n == skip) continue;
        const MatrixXd& f = factors[static_cast<std::size_t>(n)];
        if (first) {
            k = f;
            first = false;
        } else {
            // Merge little-endian: previously accumulated (earlier) modes stay fastest.
            MatrixXd next(k.rows() * f.rows(), k.cols());
            for (Index r = 0; r < k.cols(); ++r)
                for (Index j = 0; j < f.rows(); ++j)
                    next.col(r).segment(j * k.rows(), k.rows()) = f(j, r) * k.col(r);
            k = std::move(next);
        }
    }
    if (first) return MatrixXd::Ones(1, factors.empty() ? 0 : factors.front().cols());
    return k;
}

DenseTensor cp_full(const KruskalTensor& k) {
    k.validate();
    VectorXd vec = khatri_rao_all(k.factors) * k.weights;
    std::vector<double> data(vec.data(), vec.data() + vec.size());
    return DenseTensor(k.shape(), std::move(data));
}

double cp_eval(const KruskalTensor& k, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != k.order())
        throw std::invalid_argument("cp_eval: index order mismatch");
    double sum = 0.0;
    for (Index r = 0; r < k.rank(); ++r) {
        double term = k.weights(r);
        for (Index n = 0; n < k.order(); ++n) {
            Index i = idx[static_cast<std::size_t>(n)];
            if (i < 0 || i >= k.factors[static_cast<std::size_t>(n)].rows())
                throw std::out_of_range("cp_eval: index out of range on mode " + std::to_string(n));
            term *= k.factors[static_cast<std::size_t>(n)](i, r);
        }
        sum += term;
    }
    return sum;
}

namespace {

struct SweepState {
    std::vector<MatrixXd> factors;
    std::vector<MatrixXd> grams;  // B^(n)^T B^(n)
    bool regularized = false;
};

/// Solve B * G = RHS for B where G is the Hadamard product of the Grams of
/// all factors but n. Falls back to a Tikhonov-regularized system when G is
/// numerically singular.
MatrixXd solve_gram(const MatrixXd& rhs, const SweepState& st, Index n, bool& regularized) {
    const Index rank = rhs.cols();
    MatrixXd g = MatrixXd::Ones(rank, rank);
    for (Index m = 0; m < static_cast<Index>(st.factors.size()); ++m)
        if (m != n) g = g.cwiseProduct(st.grams[static_cast<std::size_t>(m)]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(g);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    if (lmax <= 0.0 || lmin < 1e-12 * lmax) {
        regularized = true;
        const double mu = std::max(lmax, 1.0) * 1e-12;
        return (g + mu * MatrixXd::Identity(rank, rank)).ldlt().solve(rhs.transpose()).transpose();
    }
    return g.ldlt().solve(rhs.transpose()).transpose();
}

}  // namespace

CpAlsResult cp_als(const DenseTensor& t, Index rank, const CpAlsOptions& opts) {
    if (rank < 1) throw std::invalid_argument("cp_als: rank must be positive");
    const Index order = t.order();
    if (order < 1) throw std::invalid_argument("cp_als: order-0 input");
    const double t_norm = t.norm();
    std::vector<MatrixXd> unfoldings;
    unfoldings.reserve(static_cast<std::size_t>(order));
    for (Index n = 0; n < order; ++n) unfoldings.push_back(matricize_mode(t, n));

    CpAlsResult best;
    double best_fit = -std::numeric_limits<double>::infinity();

    for (Index restart = 0; restart < std::max<Index>(opts.restarts, 1); ++restart) {
        Rng rng = Rng(opts.seed).split(static_cast<std::uint64_t>(restart));
        SweepState st;
        st.factors.reserve(static_cast<std::size_t>(order));
        for (Index n = 0; n < order; ++n) {
            MatrixXd f(t.dim(n), rank);
            for (Index r = 0; r < rank; ++r)
                for (Index i = 0; i < t.dim(n); ++i) f(i, r) = rng.gaussian();
            st.factors.push_back(std::move(f));
        }
        st.grams.resize(static_cast<std::size_t>(order));
        for (Index n = 0; n < order; ++n)
            st.grams[static_cast<std::size_t>(n)] =
                st.factors[static_cast<std::size_t>(n)].transpose() * st.factors[static_cast<std::size_t>(n)];

        VectorXd lambda = VectorXd::Ones(rank);
        std::vector<double> trace;
        double prev_fit = -std::numeric_limits<double>::infinity();
        Index iters = 0;

        for (Index sweep = 0; sweep < opts.max_iters; ++sweep) {
            ++iters;
            for (Index n = 0; n < order; ++n) {
                MatrixXd rhs = unfoldings[static_cast<std::size_t>(n)] * khatri_rao_all(st.factors, n);
                MatrixXd f = solve_gram(rhs, st, n, st.regularized);
                // Normalize columns; the final mode's norms become lambda.
                VectorXd norms(rank);
                for (Index r = 0; r < rank; ++r) {
                    norms(r) = f.col(r).norm();
                    if (norms(r) > 0.0) f.col(r) /= norms(r);
                }
                if (n == order - 1) lambda = norms;
                st.factors[static_cast<std::size_t>(n)] = std::move(f);
                st.grams[static_cast<std::size_t>(n)] =
                    st.factors[static_cast<std::size_t>(n)].transpose() * st.factors[static_cast<std::size_t>(n)];
            }
            // fit = 1 - ||T - X||/||T||, via the direct residual: the Gram
            // identity cancels catastrophically near machine-precision fits.
            VectorXd model_vec = khatri_rao_all(st.factors) * lambda;
            const double err = (t.as_vector() - model_vec).norm();
            const double fit = (t_norm > 0.0) ? 1.0 - err / t_norm : 1.0;
            trace.push_back(fit);
            if (std::abs(fit - prev_fit) < opts.fit_tol) { prev_fit = fit; break; }
            prev_fit = fit;
        }

        if (prev_fit > best_fit) {
            best_fit = prev_fit;
            best.model = KruskalTensor{lambda, st.factors, true};
            best.fit_trace = std::move(trace);
            best.iterations = iters;
            best.regularized = st.regularized;
        }
    }
    return best;
}

}  // namespace tnt
