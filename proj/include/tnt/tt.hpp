#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tnt/cp.hpp"
#include "tnt/tensor.hpp"
#include "tnt/tucker.hpp"

namespace tnt {

/// Tensor train (MPS): a chain of order-3 cores (R_{n-1}, I_n, R_n) with
/// boundary ranks 1. ortho_center = n marks n-orthogonality: left unfoldings
/// of cores before n have orthonormal columns, right unfoldings of cores
/// after n orthonormal rows.
class TTTensor {
public:
    explicit TTTensor(std::vector<DenseTensor> cores,
                      std::optional<Index> ortho_center = std::nullopt);

    Index order() const { return static_cast<Index>(cores_.size()); }
    Shape shape() const;
    /// Length N+1 rank chain (1, R_1, ..., R_{N-1}, 1).
    std::vector<Index> ranks() const;

    const DenseTensor& core(Index n) const { return cores_[static_cast<std::size_t>(n)]; }
    DenseTensor& core(Index n) { return cores_[static_cast<std::size_t>(n)]; }
    const std::vector<DenseTensor>& cores() const { return cores_; }

    std::optional<Index> ortho_center() const { return ortho_center_; }
    void set_ortho_center(std::optional<Index> c) { ortho_center_ = c; }

    /// Lateral slice G^(n)(:, i, :) as an R_{n-1} x R_n matrix.
    MatrixXd slice(Index n, Index i) const;

    /// Left unfolding (R_{n-1} I_n) x R_n — a pure reshape.
    Eigen::Map<const MatrixXd> left_unfolding(Index n) const;

    /// Right unfolding R_{n-1} x (I_n R_n) — a pure reshape.
    Eigen::Map<const MatrixXd> right_unfolding(Index n) const;

private:
    std::vector<DenseTensor> cores_;
    std::optional<Index> ortho_center_;
};

/// Matrix tensor train (MPO): order-4 cores (R_{n-1}, I_n, J_n, R_n).
class TTMatrix {
public:
    explicit TTMatrix(std::vector<DenseTensor> cores);

    Index order() const { return static_cast<Index>(cores_.size()); }
    std::vector<Index> row_dims() const;
    std::vector<Index> col_dims() const;
    std::vector<Index> ranks() const;

    const DenseTensor& core(Index n) const { return cores_[static_cast<std::size_t>(n)]; }
    DenseTensor& core(Index n) { return cores_[static_cast<std::size_t>(n)]; }
    const std::vector<DenseTensor>& cores() const { return cores_; }

    /// Slice A^(n)(:, i, j, :) as an R_{n-1} x R_n matrix.
    MatrixXd slice(Index n, Index i, Index j) const;

private:
    std::vector<DenseTensor> cores_;
};

/// Tensor chain (MPS with periodic boundary): R_0 = R_N >= 1.
class TCTensor {
public:
    explicit TCTensor(std::vector<DenseTensor> cores);

    Index order() const { return static_cast<Index>(cores_.size()); }
    Shape shape() const;
    std::vector<Index> ranks() const;  // length N+1, first == last

    const DenseTensor& core(Index n) const { return cores_[static_cast<std::size_t>(n)]; }
    const std::vector<DenseTensor>& cores() const { return cores_; }

    MatrixXd slice(Index n, Index i) const;

private:
    std::vector<DenseTensor> cores_;
};

// --- Evaluation and reconstruction ------------------------------------------

double tt_eval(const TTTensor& x, std::span<const Index> idx);
DenseTensor tt_full(const TTTensor& x);

double tc_eval(const TCTensor& c, std::span<const Index> idx);
DenseTensor tc_full(const TCTensor& c);

/// Densify an MPO into its (prod I) x (prod J) matrix (test/oracle scale).
MatrixXd mpo_to_matrix(const TTMatrix& a);

// --- Construction ------------------------------------------------------------

/// TT-SVD: sequential truncated SVDs with per-step budget eps/sqrt(N-1).
/// The result is left-orthogonal and satisfies ||T - full(X)||_F <= eps.
TTTensor tt_svd(const DenseTensor& t, double eps_abs,
                std::optional<Index> max_rank = std::nullopt);

struct LrmfSplit {
    MatrixXd A;  // rows x rank
    MatrixXd B;  // cols x rank, M ~ A * B^T
    double residual = 0.0;
};
using LrmfCallback = std::function<LrmfSplit(const MatrixXd&, double eps_abs)>;

/// TT decomposition with an arbitrary low-rank matrix factorization plugged
/// into the TT-SVD reshape cascade.
TTTensor tt_lrmf(const DenseTensor& t, const LrmfCallback& lrmf, double eps_abs);

/// TT decomposition by recursive Tucker-2 splits of the (first, last,
/// middle) reshape.
TTTensor tt_via_tucker2(const DenseTensor& t, double eps_abs);

/// Exact CP -> TT conversion: border cores are the border factors, middle
/// cores have diagonal lateral slices.
TTTensor cp_to_tt(const KruskalTensor& k);

/// Open a tensor chain into a TT by contracting the cycle and splitting
/// with truncated SVDs; the densified results agree within eps.
TTTensor tc_to_tt(const TCTensor& c, double eps_abs);

/// Build an MPO from a dense matrix by interleaving row/column factors.
TTMatrix mpo_from_matrix(const MatrixXd& m, std::span<const Index> row_dims,
                         std::span<const Index> col_dims, double eps_abs);

/// Identity operator as a rank-1 MPO.
TTMatrix mpo_identity(std::span<const Index> dims);

// --- Orthogonalization, rounding, ASCU ---------------------------------------

/// QR sweeps from the left up to n-1 and LQ-style sweeps from the right down
/// to n+1; the represented tensor is unchanged and ortho_center becomes n.
TTTensor tt_orthogonalize(const TTTensor& x, Index n);

/// TT rounding: left QR sweep then right-to-left delta-truncated SVD sweep,
/// delta = eps_rel / sqrt(N-1); relative contract
/// ||X - round(X)|| <= eps_rel ||X||. The delta rule is applied before the
/// rank cap.
TTTensor tt_round(const TTTensor& x, double eps_rel,
                  std::optional<Index> max_rank = std::nullopt);

enum class AscuVariant { two_side, one_side };

struct AscuOptions {
    Index max_sweeps = 4;            // full left-right + right-left passes
    std::optional<TTTensor> init;    // defaults to tt_svd at the same budget
    Index tucker2_sweeps = 3;        // inner Tucker-2 iteration cap per core
};

/// Alternating single-core update with the per-core budget
/// eps_n^2 = eps^2 - ||X||^2 + ||C^(n)||^2 (clamped at zero). Maintains
/// n-orthogonality around the active core; final error <= eps.
TTTensor ascu(const DenseTensor& t, double eps_abs, AscuVariant variant,
              const AscuOptions& opts = {});

// --- Compressed arithmetic ----------------------------------------------------

/// Addition: block-diagonal middle slices, stacked border slices; exact rank
/// bookkeeping R + R'.
TTTensor tt_add(const TTTensor& x, const TTTensor& y);

/// Hadamard product: slicewise Kronecker products, ranks R * R'.
TTTensor tt_hadamard(const TTTensor& x, const TTTensor& y);

/// Kronecker product as chain concatenation (X's modes first and fastest).
TTTensor tt_kron(const TTTensor& x, const TTTensor& y);

/// Mode-n matrix product: a single core's middle mode is transformed.
/// The orthogonality marker is cleared.
TTTensor tt_mode_matrix(const TTTensor& x, const MatrixXd& a, Index n);

/// N-D convolution: corewise partial (mode-2) convolution, ranks R * Q.
TTTensor tt_convolve(const TTTensor& x, const TTTensor& y);

/// One linear map per mode applied to every core's middle mode.
TTTensor tt_modewise_transform(const TTTensor& x, std::span<const MatrixXd> maps);

/// Left-to-right interface recursion for the inner product.
double tt_inner(const TTTensor& x, const TTTensor& y);

/// Norm via orthogonalization: ||X|| = ||core at the center||.
double tt_norm(const TTTensor& x);

/// MPO times TT vector; output ranks multiply (P_n R_n). When fuse_eps is
/// given the product is rounded at that relative accuracy.
TTTensor mpo_apply(const TTMatrix& a, const TTTensor& x,
                   std::optional<double> fuse_eps = std::nullopt);

/// MPO times MPO via the core (C) product.
TTMatrix mpo_matmat(const TTMatrix& a, const TTMatrix& x,
                    std::optional<double> fuse_eps = std::nullopt);

/// Round an MPO through its merged-mode TT view.
TTMatrix mpo_round(const TTMatrix& a, double eps_rel,
                   std::optional<Index> max_rank = std::nullopt);

/// Quadratic form x^T A x computed as inner(x, A x).
double mpo_quadratic(const TTMatrix& a, const TTTensor& x);

// --- Statistics ----------------------------------------------------------------

struct TTStats {
    std::vector<Index> ranks;
    Index param_count;
    double compression_ratio;
};

TTStats tt_stats(const TTTensor& x);

}  // namespace tnt
