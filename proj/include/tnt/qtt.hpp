#pragma once

#include <optional>
#include <vector>

#include "tnt/tensor.hpp"
#include "tnt/tt.hpp"

namespace tnt {

/// Recipe mapping a low-order array onto its quantized high-order form: one
/// ordered factor sequence per original mode, plus the interleave flag for
/// the order-2 (matrix) layout where row/column factor pairs merge per
/// virtual level.
struct QuantizationPlan {
    std::vector<std::vector<Index>> mode_factors;
    bool matrix_interleave = false;

    Shape original_shape() const {
        std::vector<Index> dims;
        for (const auto& f : mode_factors) {
            Index p = 1;
            for (Index v : f) p *= v;
            dims.push_back(p);
        }
        return Shape(dims);
    }

    /// Shape of the quantized tensor.
    Shape quantized_shape() const;

    /// True when quantization actually splits at least one mode.
    bool has_gain() const {
        for (const auto& f : mode_factors)
            if (f.size() > 1) return true;
        return false;
    }

    void validate() const;
};

/// Factor one dimension: [q]*K when dim == q^K, otherwise the mixed-radix
/// factorization from the smallest prime factors upward. A prime dim yields
/// the single factor {dim} (no quantization gain).
std::vector<Index> plan_factorize(Index dim, Index q);

/// Build the default plan for a shape with quantization base q; order-2
/// inputs get the interleaved matrix layout.
QuantizationPlan make_plan(const Shape& shape, Index q);

/// Reshape (and for matrices permute-and-merge) into the quantized form.
/// Norm-preserving and exactly invertible.
DenseTensor quantize(const DenseTensor& t, const QuantizationPlan& plan);

/// Exact inverse of quantize.
DenseTensor dequantize(const DenseTensor& tq, const QuantizationPlan& plan);

/// Quantize then compress with TT-SVD at the given absolute budget.
std::pair<TTTensor, QuantizationPlan> qtt_compress(const DenseTensor& t,
                                                   const QuantizationPlan& plan, double eps_abs,
                                                   std::optional<Index> max_rank = std::nullopt);

/// Densify the TT and undo the quantization.
DenseTensor qtt_decompress(const TTTensor& tt, const QuantizationPlan& plan);

}  // namespace tnt
