#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "guardnet/error.hpp"

namespace guardnet {

/// Tensor extents, outermost first. All extents are positive.
using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_product(const Shape& shape);

/// Dense n-dimensional array of doubles in row-major order.
///
/// Tensors are plain values: copyable, comparable, and never mutated by the
/// free operations below. A default-constructed Tensor is empty (size 0).
class Tensor {
public:
    Tensor() = default;

    /// Zero-filled tensor of the given shape. Extents must be positive.
    explicit Tensor(Shape shape);

    /// Tensor with explicit contents; data length must equal product(shape).
    Tensor(Shape shape, std::vector<double> data);

    static Tensor full(Shape shape, double value);

    /// Rank-1 tensor from a flat list of values.
    static Tensor from_vector(std::vector<double> values);

    const Shape& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double operator[](std::size_t flat_index) const { return data_[flat_index]; }
    double& operator[](std::size_t flat_index) { return data_[flat_index]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// Same flat data under a new shape; element counts must match.
    Tensor reshaped(Shape new_shape) const;

    /// Rank-1 view of the same data.
    Tensor flattened() const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

private:
    Shape shape_;
    std::vector<double> data_;
};

enum class ElementwiseOp { add, sub, mul };

/// Elementwise combination of two tensors of identical shape.
Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

/// Product of a rank-2 (m x k) tensor with a rank-2 (k x n) tensor.
Tensor matmul(const Tensor& a, const Tensor& b);

/// Mean squared error (1/N) * sum((a_i - b_i)^2) over all elements.
double mse(const Tensor& a, const Tensor& b);

/// Deterministic counter-based random stream.
///
/// Each draw mixes (seed, counter) through splitmix64, so the stream is a
/// pure function of the seed and the draw index: the same seed gives the
/// same sequence on every run. There is no global state. For concurrent
/// work, give each worker its own stream via split(worker_index).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();

    /// Uniform draw in [0, 1).
    double next_uniform();

    /// Uniform draw in [0, n). n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    /// Normal draw via Box-Muller; stddev must be >= 0.
    double next_normal(double mean, double stddev);

    /// Independent child stream derived from (seed, stream index).
    /// Does not depend on how many draws this stream has produced.
    Rng split(std::uint64_t stream_index) const;

private:
    std::uint64_t seed_ = 0;
    std::uint64_t counter_ = 0;
};

/// Seed for a named pipeline stage: seed XOR fnv1a64(tag).
std::uint64_t stage_seed(std::uint64_t seed, std::string_view tag);

/// Tensor of normal draws with the given shape; stddev 0 gives a constant
/// tensor of value `mean`.
Tensor draw_normal(Rng& rng, const Shape& shape, double mean, double stddev);

}  // namespace guardnet
