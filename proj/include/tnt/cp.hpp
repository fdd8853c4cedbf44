#pragma once

#include <cstdint>
#include <vector>

#include "tnt/tensor.hpp"

namespace tnt {

/// CP (Kruskal) format: weights plus N factor matrices sharing a column
/// count R. When `normalized` is set every factor column has unit 2-norm.
struct KruskalTensor {
    VectorXd weights;
    std::vector<MatrixXd> factors;
    bool normalized = false;

    Index rank() const { return weights.size(); }
    Index order() const { return static_cast<Index>(factors.size()); }

    Shape shape() const {
        std::vector<Index> dims;
        dims.reserve(factors.size());
        for (const auto& f : factors) dims.push_back(f.rows());
        return Shape(dims);
    }

    void validate() const;
};

DenseTensor cp_full(const KruskalTensor& k);
double cp_eval(const KruskalTensor& k, std::span<const Index> idx);

/// Column-wise Khatri-Rao chain of the factor list in ascending mode order;
/// column r of the result is the vectorization of the rank-1 term r.
MatrixXd khatri_rao_all(const std::vector<MatrixXd>& factors, Index skip = -1);

struct CpAlsOptions {
    Index max_iters = 200;
    double fit_tol = 1e-8;
    std::uint64_t seed = 0;
    Index restarts = 1;
};

struct CpAlsResult {
    KruskalTensor model;
    std::vector<double> fit_trace;  // fit after each sweep of the best restart
    Index iterations = 0;
    bool regularized = false;       // a Gram system needed Tikhonov help
};

/// Alternating least squares for the CP decomposition, generalized to order
/// N. Columns are normalized after every factor update; the norms land in
/// the weight vector at the final factor of each sweep.
CpAlsResult cp_als(const DenseTensor& t, Index rank, const CpAlsOptions& opts = {});

}  // namespace tnt
