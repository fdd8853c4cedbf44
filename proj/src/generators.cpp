#include "tnt/generators.hpp"

#include <cmath>

#include "tnt/matrix_kernels.hpp"
#include "tnt/rng.hpp"
#include "tnt/tensor_ops.hpp"
#include "tnt/tucker.hpp"

namespace tnt {

SyntheticKind synthetic_kind_from_name(const std::string& name) {
    if (name == "rand-tt") return SyntheticKind::rand_tt;
    if (name == "rand-tucker") return SyntheticKind::rand_tucker;
    if (name == "rank1") return SyntheticKind::rank1;
    if (name == "hilbert") return SyntheticKind::hilbert;
    if (name == "ramp") return SyntheticKind::ramp;
    if (name == "geometric") return SyntheticKind::geometric;
    throw std::invalid_argument("unknown generator kind: " + name);
}

TTTensor random_tt(std::span<const Index> dims, std::span<const Index> bond_ranks,
                   std::uint64_t seed) {
    const Index n_modes = static_cast<Index>(dims.size());
    if (n_modes < 1) throw std::invalid_argument("random_tt: empty shape");
    if (static_cast<Index>(bond_ranks.size()) != std::max<Index>(n_modes - 1, 0))
        throw std::invalid_argument("random_tt: need order-1 bond ranks");
    Rng root(seed);
    std::vector<DenseTensor> cores;
    Index r_left = 1;
    for (Index n = 0; n < n_modes; ++n) {
        const Index r_right = (n == n_modes - 1) ? 1 : bond_ranks[static_cast<std::size_t>(n)];
        DenseTensor core{Shape{r_left, dims[static_cast<std::size_t>(n)], r_right}};
        Rng rng = root.split(static_cast<std::uint64_t>(n));
        for (Index i = 0; i < core.size(); ++i) core[i] = rng.gaussian();
        cores.push_back(std::move(core));
        r_left = r_right;
    }
    return TTTensor(std::move(cores));
}

TTMatrix random_mpo(std::span<const Index> row_dims, std::span<const Index> col_dims,
                    std::span<const Index> bond_ranks, std::uint64_t seed) {
    const Index n_modes = static_cast<Index>(row_dims.size());
    if (col_dims.size() != row_dims.size())
        throw std::invalid_argument("random_mpo: row/col factor counts differ");
    if (static_cast<Index>(bond_ranks.size()) != std::max<Index>(n_modes - 1, 0))
        throw std::invalid_argument("random_mpo: need order-1 bond ranks");
    Rng root(seed);
    std::vector<DenseTensor> cores;
    Index r_left = 1;
    for (Index n = 0; n < n_modes; ++n) {
        const Index r_right = (n == n_modes - 1) ? 1 : bond_ranks[static_cast<std::size_t>(n)];
        DenseTensor core{Shape{r_left, row_dims[static_cast<std::size_t>(n)],
                               col_dims[static_cast<std::size_t>(n)], r_right}};
        Rng rng = root.split(static_cast<std::uint64_t>(n));
        for (Index i = 0; i < core.size(); ++i) core[i] = rng.gaussian();
        cores.push_back(std::move(core));
        r_left = r_right;
    }
    return TTMatrix(std::move(cores));
}

TCTensor random_tc(std::span<const Index> dims, Index bond_rank, std::uint64_t seed) {
    if (dims.empty()) throw std::invalid_argument("random_tc: empty shape");
    if (bond_rank < 1) throw std::invalid_argument("random_tc: bond rank must be positive");
    Rng root(seed);
    std::vector<DenseTensor> cores;
    for (std::size_t n = 0; n < dims.size(); ++n) {
        DenseTensor core{Shape{bond_rank, dims[n], bond_rank}};
        Rng rng = root.split(static_cast<std::uint64_t>(n));
        for (Index i = 0; i < core.size(); ++i) core[i] = rng.gaussian();
        cores.push_back(std::move(core));
    }
    return TCTensor(std::move(cores));
}

DenseTensor random_dense(const Shape& shape, std::uint64_t seed) {
    DenseTensor t{shape};
    Rng rng(seed);
    for (Index i = 0; i < t.size(); ++i) t[i] = rng.gaussian();
    return t;
}

TuckerTensor random_tucker(std::span<const Index> dims, std::span<const Index> ranks,
                           std::uint64_t seed) {
    if (dims.size() != ranks.size())
        throw std::invalid_argument("random_tucker: need one rank per mode");
    Rng root(seed);
    TuckerTensor t;
    std::vector<Index> rank_dims(ranks.begin(), ranks.end());
    t.core = random_dense(Shape(rank_dims), root.split(0xc07eull).next_u64());
    for (std::size_t n = 0; n < dims.size(); ++n) {
        if (ranks[n] < 1 || ranks[n] > dims[n])
            throw std::invalid_argument("random_tucker: rank exceeds dimension bound");
        t.factors.push_back(random_orthonormal(dims[n], ranks[n],
                                               root.split(static_cast<std::uint64_t>(n)).next_u64()));
    }
    t.orthonormal = true;
    return t;
}

DenseTensor gen_synthetic(SyntheticKind kind, const SyntheticParams& params) {
    const Shape shape{params.dims};
    switch (kind) {
        case SyntheticKind::rand_tt: {
            std::vector<Index> bonds = params.ranks;
            if (bonds.empty()) bonds.assign(static_cast<std::size_t>(shape.order() - 1), 2);
            // Clamp requested bond ranks at the attainable canonical bounds so
            // generated files always densify to tensors with those TT ranks.
            for (std::size_t n = 0; n < bonds.size(); ++n) {
                Index left = 1, right = 1;
                for (std::size_t m = 0; m <= n; ++m) left *= params.dims[m];
                for (std::size_t m = n + 1; m < params.dims.size(); ++m) right *= params.dims[m];
                const Index bound = std::min(left, right);
                if (bonds[n] < 1 || bonds[n] > bound)
                    throw std::invalid_argument("gen_synthetic: rand-tt rank " +
                                                std::to_string(bonds[n]) +
                                                " exceeds dimension bound " + std::to_string(bound));
            }
            return tt_full(random_tt(params.dims, bonds, params.seed));
        }
        case SyntheticKind::rand_tucker: {
            std::vector<Index> ranks = params.ranks;
            if (ranks.empty())
                for (Index d : params.dims) ranks.push_back(std::max<Index>(1, d / 2));
            return tucker_full(random_tucker(params.dims, ranks, params.seed));
        }
        case SyntheticKind::rank1: {
            Rng root(params.seed);
            DenseTensor t = DenseTensor::scalar(1.0);
            for (std::size_t n = 0; n < params.dims.size(); ++n) {
                Rng rng = root.split(static_cast<std::uint64_t>(n));
                VectorXd v(params.dims[n]);
                for (Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
                v.normalize();
                t = outer(t, from_vector(v));
            }
            return t;
        }
        case SyntheticKind::hilbert: {
            DenseTensor t{shape};
            for (Index lin = 0; lin < t.size(); ++lin) {
                const auto idx = multi_index(shape, lin);
                Index sum = 0;
                for (Index v : idx) sum += v;
                t[lin] = 1.0 / static_cast<double>(sum + 1);
            }
            return t;
        }
        case SyntheticKind::ramp: {
            DenseTensor t{shape};
            for (Index lin = 0; lin < t.size(); ++lin) t[lin] = static_cast<double>(lin + 1);
            return t;
        }
        case SyntheticKind::geometric: {
            DenseTensor t{shape};
            for (Index lin = 0; lin < t.size(); ++lin)
                t[lin] = std::pow(params.rho, static_cast<double>(lin));
            return t;
        }
    }
    throw std::logic_error("gen_synthetic: unknown kind");
}

}  // namespace tnt
