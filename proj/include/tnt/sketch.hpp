#pragma once

#include <cstdint>
#include <vector>

#include "tnt/tensor.hpp"
#include "tnt/tucker.hpp"

namespace tnt {

enum class TestDistribution { gaussian, orthonormal, rademacher, sparse_rademacher, srft };

/// One test (sensing) matrix: rows x cols drawn from the named family.
struct TestMatrixSpec {
    TestDistribution dist = TestDistribution::gaussian;
    Index rows = 1;
    Index cols = 1;
    std::uint64_t seed = 0;
    Index sparsity = 1;  // nonzeros per column for sparse_rademacher
};

/// Deterministic per seed. The orthonormal family satisfies Omega Omega^T = I;
/// the SRFT is P F D with F the orthonormal DCT-II.
MatrixXd draw_test_matrix(const TestMatrixSpec& spec);

/// Fully projected core Z plus the N leave-one-mode-out sketches Z_n.
struct SketchSet {
    DenseTensor z;
    std::vector<DenseTensor> z_leave_one;
    std::vector<TestMatrixSpec> specs;
};

SketchSet sketch(const DenseTensor& t, const std::vector<TestMatrixSpec>& specs);

struct SketchInfo {
    std::vector<Index> ranks;     // numerical rank of each Z_(n)
    bool rank_deficient = false;  // some Z_(n) lost row rank
};

/// Tucker reconstruction from sketches: factors B^(n) = [Z_n]_(n) Z_(n)^+,
/// core Z. Exact when the multilinear rank is below the sketch sizes;
/// rank-deficient projections fall back to a tolerance pseudo-inverse.
TuckerTensor sketch_reconstruct(const SketchSet& s, SketchInfo* info = nullptr);

struct FstdInfo {
    std::vector<double> w_condition;  // condition estimate of each W_(n)
};

/// Fiber sampling Tucker decomposition: factors are exact fiber subsets,
/// the core is built from the intersection subtensor W via its unfolding
/// pseudo-inverses.
TuckerTensor fstd(const DenseTensor& t, const std::vector<std::vector<Index>>& index_sets,
                  FstdInfo* info = nullptr);

/// Greedy max-modulus fiber selection with rank-1 cross deflation;
/// deterministic with first-occurrence tie-breaking.
std::vector<std::vector<Index>> fiber_select_maxmod(const DenseTensor& t,
                                                    std::span<const Index> sizes);

}  // namespace tnt
