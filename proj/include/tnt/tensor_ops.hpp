#pragma once

#include <span>
#include <vector>

#include "tnt/tensor.hpp"

namespace tnt {

// ---------------------------------------------------------------------------
// Matricizations
// ---------------------------------------------------------------------------

/// Mode-n matricization: I_n rows, columns are the mode-n fibers indexed by
/// the little-endian merge of the remaining modes in ascending order.
MatrixXd matricize_mode(const DenseTensor& t, Index n);

/// Inverse of matricize_mode: fold an I_n x prod(rest) matrix back into a
/// tensor whose mode n has m.rows() rows and whose other modes match `shape`.
DenseTensor unmatricize_mode(const MatrixXd& m, const Shape& shape, Index n);

/// Canonical matricization: rows merge modes 1..n, columns the rest.
/// A pure reshape under little-endian order; n == order yields a column.
MatrixXd matricize_canonical(const DenseTensor& t, Index n);

// ---------------------------------------------------------------------------
// Multilinear products and contractions
// ---------------------------------------------------------------------------

/// Tensor-times-matrix: mode n of size I_n becomes b.rows(), order preserved.
DenseTensor mode_product(const DenseTensor& t, const MatrixXd& b, Index n);

/// Tensor-times-vector: order drops by one, mode n removed.
DenseTensor mode_product_vec(const DenseTensor& t, const VectorXd& b, Index n);

/// Tucker product: apply factors[n] along mode n for every mode.
DenseTensor multilinear_product(const DenseTensor& core, std::span<const MatrixXd> factors);

/// Tucker product applying transposed factors (projections).
DenseTensor multilinear_product_t(const DenseTensor& t, std::span<const MatrixXd> factors);

/// As multilinear_product_t but leaving mode `skip` untouched.
DenseTensor multilinear_product_t_skip(const DenseTensor& t, std::span<const MatrixXd> factors,
                                       Index skip);

/// Contract paired modes of two tensors; remaining A-modes (ascending)
/// precede remaining B-modes. Contracting all modes yields an order-0 scalar.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b, std::span<const Index> modes_a,
                     std::span<const Index> modes_b);

/// Scalar inner product <A, B>.
double inner(const DenseTensor& a, const DenseTensor& b);

// ---------------------------------------------------------------------------
// Products that enlarge or combine tensors
// ---------------------------------------------------------------------------

/// Outer product: order N+M, c_{i,j} = a_i * b_j (A-modes first, hence fastest).
DenseTensor outer(const DenseTensor& a, const DenseTensor& b);

/// Left Kronecker product of equal-order tensors (shorter operand is padded
/// with trailing singleton modes). Mode n gets size I_n*J_n with A's index
/// fastest in each merged mode; on matrices this is B kron A.
DenseTensor kron(const DenseTensor& a, const DenseTensor& b);

/// Columnwise left Kronecker product of matrices with equal column counts:
/// column r is a_r kron_L b_r (A's row index fastest), shape (I*J) x R.
MatrixXd khatri_rao(const MatrixXd& a, const MatrixXd& b);

/// Columnwise right (standard) Kronecker product: column r is a_r kron b_r.
MatrixXd khatri_rao_right(const MatrixXd& a, const MatrixXd& b);

/// Rowwise (mode-1) Khatri-Rao: row i is the Kronecker of rows A(i,:), B(i,:)
/// with A's column index fastest; shape I x (R*Q).
MatrixXd khatri_rao_rows(const MatrixXd& a, const MatrixXd& b);

/// Mode-n Khatri-Rao of tensors with I_n == J_n: slice i_n of the result is
/// the Kronecker product of the operands' slices at i_n.
DenseTensor khatri_rao_tensor(const DenseTensor& a, const DenseTensor& b, Index n);

/// Entrywise product of identically shaped tensors.
DenseTensor hadamard(const DenseTensor& a, const DenseTensor& b);

// ---------------------------------------------------------------------------
// Glue family
// ---------------------------------------------------------------------------

/// Direct sum: block placement on the diagonal corners, zeros elsewhere.
DenseTensor direct_sum(const DenseTensor& a, const DenseTensor& b);

/// Partial direct sum: mode n is shared (I_n == J_n), all other modes add.
DenseTensor partial_direct_sum(const DenseTensor& a, const DenseTensor& b, Index n);

/// Concatenation along mode n; all other modes must match.
DenseTensor concat(const DenseTensor& a, const DenseTensor& b, Index n);

// ---------------------------------------------------------------------------
// Convolutions and traces
// ---------------------------------------------------------------------------

/// Full N-D convolution: mode sizes I_n + J_n - 1.
DenseTensor convolve(const DenseTensor& a, const DenseTensor& b);

/// Partial (mode-n) convolution: remaining index pairs merge little-endian
/// with A's index fastest; 1-D full convolution along mode n.
DenseTensor convolve_mode(const DenseTensor& a, const DenseTensor& b, Index n);

/// Sum over paired diagonal modes; open modes remain in ascending order.
DenseTensor tensor_trace(const DenseTensor& a, std::span<const std::pair<Index, Index>> pairs);

}  // namespace tnt
