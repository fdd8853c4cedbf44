#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tnt/tensor.hpp"
#include "tnt/tt.hpp"

namespace tnt {

enum class SyntheticKind { rand_tt, rand_tucker, rank1, hilbert, ramp, geometric };

SyntheticKind synthetic_kind_from_name(const std::string& name);

struct SyntheticParams {
    std::vector<Index> dims;
    std::vector<Index> ranks;  // bond/multilinear ranks where applicable
    std::uint64_t seed = 0;
    double rho = 0.9;          // geometric ratio
};

/// Deterministic per seed. rand-tt densifies a random TT of the given bond
/// ranks, rand-tucker a random orthonormal-factor Tucker tensor; rank1,
/// hilbert, ramp and geometric are analytic families.
DenseTensor gen_synthetic(SyntheticKind kind, const SyntheticParams& params);

/// Random TT with the given interior bond ranks (gaussian cores).
TTTensor random_tt(std::span<const Index> dims, std::span<const Index> bond_ranks,
                   std::uint64_t seed);

/// Random MPO with the given interior bond ranks.
TTMatrix random_mpo(std::span<const Index> row_dims, std::span<const Index> col_dims,
                    std::span<const Index> bond_ranks, std::uint64_t seed);

/// Random tensor chain with a uniform bond rank (including the cycle bond).
TCTensor random_tc(std::span<const Index> dims, Index bond_rank, std::uint64_t seed);

/// Dense tensor with iid standard normal entries.
DenseTensor random_dense(const Shape& shape, std::uint64_t seed);

/// Random Tucker tensor with orthonormal factors and gaussian core.
TuckerTensor random_tucker(std::span<const Index> dims, std::span<const Index> ranks,
                           std::uint64_t seed);

}  // namespace tnt
