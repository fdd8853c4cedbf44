#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tnt/tensor.hpp"

namespace tnt {

/// Tucker format: core tensor plus one factor matrix per mode.
struct TuckerTensor {
    DenseTensor core;
    std::vector<MatrixXd> factors;
    bool orthonormal = false;

    Index order() const { return static_cast<Index>(factors.size()); }

    Shape shape() const {
        std::vector<Index> dims;
        dims.reserve(factors.size());
        for (const auto& f : factors) dims.push_back(f.rows());
        return Shape(dims);
    }

    std::vector<Index> ranks() const { return core.shape().dims(); }

    void validate() const;
};

DenseTensor tucker_full(const TuckerTensor& t);

/// Sequentially truncated HOSVD with per-mode budget eps/sqrt(N); the
/// returned core is all-orthogonal and the factors orthonormal.
TuckerTensor sthosvd(const DenseTensor& t, double eps_abs);

/// Same sequential sweep at fixed per-mode ranks.
TuckerTensor sthosvd_ranks(const DenseTensor& t, std::span<const Index> ranks);

struct HooiOptions {
    Index max_sweeps = 200;
    double tol = 1e-8;
};

/// Higher-order orthogonal iteration at fixed ranks, initialized from the
/// sequentially truncated HOSVD.
TuckerTensor hooi(const DenseTensor& t, std::span<const Index> ranks, const HooiOptions& opts = {});

/// Randomized HOOI: Gaussian factor init, a fixed number of randomized
/// sweeps, then the core contraction.
TuckerTensor hooi_randomized(const DenseTensor& t, std::span<const Index> ranks,
                             std::uint64_t seed, Index sweeps = 2);

/// Pluggable low-rank matrix factorization: given (matrix, rank) return the
/// I_n x R_n factor for that unfolding.
using LrmfFactor = std::function<MatrixXd(const MatrixXd&, Index)>;

/// Tucker decomposition with per-mode factors from an arbitrary LRMF; the
/// core comes from pseudo-inverse projections.
TuckerTensor tucker_via_lrmf(const DenseTensor& t, std::span<const Index> ranks,
                             const LrmfFactor& lrmf);

struct Tucker2Options {
    Index max_sweeps = 100;
    double tol = 1e-10;  // relative change of retained eigenvalue sums
};

struct Tucker2Result {
    MatrixXd A, B;     // orthonormal columns
    DenseTensor core;  // R1 x R2 x K
    Index iterations = 0;
};

/// Orthogonal Tucker-2 of an order-3 tensor: alternating eigendecompositions
/// of Gram matrices with ranks chosen by the retained-eigenvalue-sum rule
/// sum(lambda) >= ||X||_F^2 - eps^2.
Tucker2Result tucker2(const DenseTensor& t3, double eps_abs, const Tucker2Options& opts = {});

struct PvdResult {
    MatrixXd A, B;
    std::vector<MatrixXd> cores;  // G_k = A^T X_k B
};

/// Population value decomposition with orthogonality: per-slice truncated
/// SVDs, stacked bases, common left/right factors.
PvdResult pvd(const std::vector<MatrixXd>& slices, Index r, Index r1, Index r2);

// --- Compressed arithmetic in the Tucker format -----------------------------

TuckerTensor tucker_add(const TuckerTensor& x, const TuckerTensor& y);
TuckerTensor tucker_kron(const TuckerTensor& x, const TuckerTensor& y);
TuckerTensor tucker_hadamard(const TuckerTensor& x, const TuckerTensor& y);
TuckerTensor tucker_convolve(const TuckerTensor& x, const TuckerTensor& y);
double tucker_inner(const TuckerTensor& x, const TuckerTensor& y);

/// Frobenius norm; the core-norm shortcut is only taken when the orthonormal
/// flag is set, otherwise this falls back to inner(x, x).
double tucker_norm(const TuckerTensor& x);

/// Apply one invertible linear map per mode to the factors (fast transforms
/// in compressed form).
TuckerTensor tucker_modewise_transform(const TuckerTensor& x, std::span<const MatrixXd> maps);

/// Per-mode numerical ranks of the unfoldings at threshold tol * sigma_1.
std::vector<Index> multilinear_rank(const DenseTensor& t, double tol);

}  // namespace tnt
