#include "tnt/qtt.hpp"

#include <algorithm>

namespace tnt {

Shape QuantizationPlan::quantized_shape() const {
    if (matrix_interleave) {
        if (mode_factors.size() != 2)
            throw std::invalid_argument("QuantizationPlan: interleave needs exactly two modes");
        const auto& fi = mode_factors[0];
        const auto& fj = mode_factors[1];
        const std::size_t levels = std::max(fi.size(), fj.size());
        std::vector<Index> dims(levels);
        for (std::size_t k = 0; k < levels; ++k) {
            Index a = (k < fi.size()) ? fi[k] : 1;
            Index b = (k < fj.size()) ? fj[k] : 1;
            dims[k] = a * b;
        }
        return Shape(dims);
    }
    std::vector<Index> dims;
    for (const auto& f : mode_factors) dims.insert(dims.end(), f.begin(), f.end());
    return Shape(dims);
}

void QuantizationPlan::validate() const {
    for (const auto& f : mode_factors) {
        if (f.empty()) throw std::invalid_argument("QuantizationPlan: empty factor list");
        for (Index v : f)
            if (v < 1) throw std::invalid_argument("QuantizationPlan: non-positive factor");
    }
    if (matrix_interleave && mode_factors.size() != 2)
        throw std::invalid_argument("QuantizationPlan: interleave needs exactly two modes");
}

std::vector<Index> plan_factorize(Index dim, Index q) {
    if (dim < 1) throw std::invalid_argument("plan_factorize: dimension must be positive");
    if (q < 2) throw std::invalid_argument("plan_factorize: base must be at least 2");
    if (dim == 1) return {1};
    // Pure power of q first.
    Index rem = dim;
    Index count = 0;
    while (rem % q == 0) { rem /= q; ++count; }
    if (rem == 1) return std::vector<Index>(static_cast<std::size_t>(count), q);
    // Mixed radix: smallest prime factors upward.
    std::vector<Index> factors;
    rem = dim;
    for (Index p = 2; p * p <= rem; ++p)
        while (rem % p == 0) {
            factors.push_back(p);
            rem /= p;
        }
    if (rem > 1) factors.push_back(rem);
    return factors;
}

QuantizationPlan make_plan(const Shape& shape, Index q) {
    QuantizationPlan plan;
    for (Index n = 0; n < shape.order(); ++n)
        plan.mode_factors.push_back(plan_factorize(shape.dim(n), q));
    plan.matrix_interleave = (shape.order() == 2);
    return plan;
}

namespace {

/// The interleaved layout as an explicit permutation of the fully expanded
/// virtual modes: (i_1, j_1, i_2, j_2, ...) with missing levels padded by
/// singleton modes on the tail of each factor list.
struct InterleaveLayout {
    std::vector<Index> expanded_dims;   // i-factors then j-factors (padded)
    std::vector<Index> perm;            // expanded -> interleaved
    Shape merged;                       // per-level I_k * J_k
};

InterleaveLayout interleave_layout(const QuantizationPlan& plan) {
    InterleaveLayout lay;
    auto fi = plan.mode_factors[0];
    auto fj = plan.mode_factors[1];
    const std::size_t levels = std::max(fi.size(), fj.size());
    fi.resize(levels, 1);
    fj.resize(levels, 1);
    lay.expanded_dims.assign(fi.begin(), fi.end());
    lay.expanded_dims.insert(lay.expanded_dims.end(), fj.begin(), fj.end());
    std::vector<Index> merged(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        lay.perm.push_back(static_cast<Index>(k));
        lay.perm.push_back(static_cast<Index>(k + levels));
        merged[k] = fi[k] * fj[k];
    }
    lay.merged = Shape(merged);
    return lay;
}

}  // namespace

DenseTensor quantize(const DenseTensor& t, const QuantizationPlan& plan) {
    plan.validate();
    if (plan.original_shape() != t.shape())
        throw std::invalid_argument("quantize: plan does not match tensor shape");
    if (!plan.matrix_interleave) return reshape(t, plan.quantized_shape());
    InterleaveLayout lay = interleave_layout(plan);
    DenseTensor expanded = reshape(t, Shape(lay.expanded_dims));
    return reshape(permute(expanded, lay.perm), lay.merged);
}

DenseTensor dequantize(const DenseTensor& tq, const QuantizationPlan& plan) {
    plan.validate();
    if (plan.quantized_shape() != tq.shape())
        throw std::invalid_argument("dequantize: plan does not match quantized shape");
    if (!plan.matrix_interleave) return reshape(tq, plan.original_shape());
    InterleaveLayout lay = interleave_layout(plan);
    // Undo the merge, invert the permutation, then collapse back.
    std::vector<Index> interleaved_dims(lay.perm.size());
    for (std::size_t k = 0; k < lay.perm.size(); ++k)
        interleaved_dims[k] = lay.expanded_dims[static_cast<std::size_t>(lay.perm[k])];
    DenseTensor split = reshape(tq, Shape(interleaved_dims));
    std::vector<Index> inv(lay.perm.size());
    for (std::size_t k = 0; k < lay.perm.size(); ++k)
        inv[static_cast<std::size_t>(lay.perm[k])] = static_cast<Index>(k);
    return reshape(permute(split, inv), plan.original_shape());
}

std::pair<TTTensor, QuantizationPlan> qtt_compress(const DenseTensor& t,
                                                   const QuantizationPlan& plan, double eps_abs,
                                                   std::optional<Index> max_rank) {
    return {tt_svd(quantize(t, plan), eps_abs, max_rank), plan};
}

DenseTensor qtt_decompress(const TTTensor& tt, const QuantizationPlan& plan) {
    return dequantize(tt_full(tt), plan);
}

}  // namespace tnt
