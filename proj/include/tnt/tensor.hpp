#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tnt {

using Index = std::int64_t;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Mode sizes of an N-way array. Order 0 denotes a scalar.
class Shape {
public:
    Shape() = default;

    explicit Shape(std::vector<Index> dims) : dims_(std::move(dims)) {
        for (std::size_t n = 0; n < dims_.size(); ++n) {
            if (dims_[n] < 1)
                throw std::invalid_argument("Shape: mode " + std::to_string(n) +
                                            " has non-positive size");
        }
    }

    Shape(std::initializer_list<Index> dims) : Shape(std::vector<Index>(dims)) {}

    Index order() const { return static_cast<Index>(dims_.size()); }

    Index dim(Index n) const { return dims_.at(static_cast<std::size_t>(n)); }

    const std::vector<Index>& dims() const { return dims_; }

    /// Total element count (1 for a scalar).
    Index count() const {
        Index c = 1;
        for (Index d : dims_) c *= d;
        return c;
    }

    bool operator==(const Shape&) const = default;

private:
    std::vector<Index> dims_;
};

/// Little-endian linearization: the first index component varies fastest.
/// Indices are zero-based; the result is a zero-based offset.
inline Index linear_index(const Shape& shape, std::span<const Index> idx) {
    if (static_cast<Index>(idx.size()) != shape.order())
        throw std::invalid_argument("linear_index: index order mismatch");
    Index lin = 0;
    Index stride = 1;
    for (Index n = 0; n < shape.order(); ++n) {
        if (idx[n] < 0 || idx[n] >= shape.dim(n))
            throw std::out_of_range("linear_index: component for mode " +
                                    std::to_string(n) + " out of range");
        lin += idx[n] * stride;
        stride *= shape.dim(n);
    }
    return lin;
}

/// Inverse of linear_index.
inline std::vector<Index> multi_index(const Shape& shape, Index lin) {
    if (lin < 0 || lin >= shape.count())
        throw std::out_of_range("multi_index: linear index out of range");
    std::vector<Index> idx(static_cast<std::size_t>(shape.order()));
    for (Index n = 0; n < shape.order(); ++n) {
        idx[n] = lin % shape.dim(n);
        lin /= shape.dim(n);
    }
    return idx;
}

/// Dense N-way array of doubles stored in little-endian multi-index order.
/// Values are immutable by convention: operations return new tensors.
class DenseTensor {
public:
    /// Order-0 scalar holding zero.
    DenseTensor() : shape_(), data_(1, 0.0) {}

    explicit DenseTensor(Shape shape)
        : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_.count()), 0.0) {}

    DenseTensor(Shape shape, std::vector<double> data)
        : shape_(std::move(shape)), data_(std::move(data)) {
        if (static_cast<Index>(data_.size()) != shape_.count())
            throw std::invalid_argument("DenseTensor: data length " +
                                        std::to_string(data_.size()) +
                                        " does not match element count " +
                                        std::to_string(shape_.count()));
    }

    static DenseTensor scalar(double v) {
        DenseTensor t;
        t.data_[0] = v;
        return t;
    }

    const Shape& shape() const { return shape_; }
    Index order() const { return shape_.order(); }
    Index dim(Index n) const { return shape_.dim(n); }
    Index size() const { return static_cast<Index>(data_.size()); }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    double operator[](Index lin) const { return data_[static_cast<std::size_t>(lin)]; }
    double& operator[](Index lin) { return data_[static_cast<std::size_t>(lin)]; }

    double at(std::span<const Index> idx) const { return data_[linear_index(shape_, idx)]; }
    double& at(std::span<const Index> idx) { return data_[linear_index(shape_, idx)]; }

    double operator()(std::initializer_list<Index> idx) const {
        return at(std::span<const Index>(idx.begin(), idx.size()));
    }
    double& operator()(std::initializer_list<Index> idx) {
        return at(std::span<const Index>(idx.begin(), idx.size()));
    }

    double norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    /// View the flat data as a rows x cols column-major matrix (pure reshape).
    Eigen::Map<const MatrixXd> as_matrix(Index rows, Index cols) const {
        if (rows * cols != size())
            throw std::invalid_argument("as_matrix: element count mismatch");
        return Eigen::Map<const MatrixXd>(data_.data(), rows, cols);
    }

    Eigen::Map<const VectorXd> as_vector() const {
        return Eigen::Map<const VectorXd>(data_.data(), size());
    }

    bool operator==(const DenseTensor&) const = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Metadata-only reshape; the stored sequence is untouched.
/// Covers vectorization and tensorization/quantization reshapes.
inline DenseTensor reshape(const DenseTensor& t, Shape new_shape) {
    if (new_shape.count() != t.size())
        throw std::invalid_argument("reshape: element count mismatch (" +
                                    std::to_string(t.size()) + " vs " +
                                    std::to_string(new_shape.count()) + ")");
    return DenseTensor(std::move(new_shape), t.data());
}

/// Reorder modes: result mode k is input mode perm[k].
DenseTensor permute(const DenseTensor& t, std::span<const Index> perm);

inline DenseTensor from_matrix(const MatrixXd& m) {
    std::vector<double> data(m.data(), m.data() + m.size());
    return DenseTensor(Shape{m.rows(), m.cols()}, std::move(data));
}

inline DenseTensor from_vector(const VectorXd& v) {
    std::vector<double> data(v.data(), v.data() + v.size());
    return DenseTensor(Shape{v.size()}, std::move(data));
}

}  // namespace tnt
