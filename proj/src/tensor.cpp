#include "guardnet/tensor.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace guardnet {

std::string shape_to_string(const Shape& shape) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) out << ", ";
        out << shape[i];
    }
    out << ')';
    return out.str();
}

std::size_t shape_product(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t extent : shape) n *= extent;
    return n;
}

namespace {

void check_extents(const Shape& shape) {
    for (std::size_t extent : shape) {
        if (extent == 0) {
            throw ShapeError("tensor shape " + shape_to_string(shape) +
                             " has a zero extent");
        }
    }
}

}  // namespace

Tensor::Tensor(Shape shape) {
    check_extents(shape);
    shape_ = std::move(shape);
    data_.assign(shape_product(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data) {
    check_extents(shape);
    if (shape_product(shape) != data.size()) {
        throw ShapeError("tensor shape " + shape_to_string(shape) + " implies " +
                         std::to_string(shape_product(shape)) +
                         " elements, got " + std::to_string(data.size()));
    }
    shape_ = std::move(shape);
    data_ = std::move(data);
}

Tensor Tensor::full(Shape shape, double value) {
    Tensor t(std::move(shape));
    for (double& x : t.data_) x = value;
    return t;
}

Tensor Tensor::from_vector(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

Tensor Tensor::reshaped(Shape new_shape) const {
    check_extents(new_shape);
    if (shape_product(new_shape) != data_.size()) {
        throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " +
                         shape_to_string(new_shape) + ": element counts differ");
    }
    return Tensor(std::move(new_shape), data_);
}

Tensor Tensor::flattened() const { return Tensor({data_.size()}, data_); }

namespace {

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shapes " +
                         shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()) + " differ");
    }
}

}  // namespace

Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b) {
    check_same_shape("elementwise", a, b);
    Tensor out = a;
    switch (op) {
    case ElementwiseOp::add:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
        break;
    case ElementwiseOp::sub:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
        break;
    case ElementwiseOp::mul:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
        break;
    }
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(ElementwiseOp::add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(ElementwiseOp::sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(ElementwiseOp::mul, a, b); }

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul: expected rank-2 tensors, got " +
                         shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()));
    }
    const std::size_t m = a.shape()[0];
    const std::size_t k = a.shape()[1];
    const std::size_t n = b.shape()[1];
    if (b.shape()[0] != k) {
        throw ShapeError("matmul: inner dimensions of " +
                         shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()) + " do not agree");
    }
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            for (std::size_t j = 0; j < n; ++j) {
                out[i * n + j] += aip * b[p * n + j];
            }
        }
    }
    return out;
}

double mse(const Tensor& a, const Tensor& b) {
    check_same_shape("mse", a, b);
    if (a.empty()) {
        throw DomainError("mse: tensors are empty");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
    counter_ += 1;
    return splitmix64(seed_ + counter_ * 0x9E3779B97F4A7C15ull);
}

double Rng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::next_below(std::uint64_t n) {
    if (n == 0) throw DomainError("Rng::next_below: n must be positive");
    return next_u64() % n;
}

double Rng::next_normal(double mean, double stddev) {
    if (stddev < 0.0) {
        throw DomainError("Rng::next_normal: stddev must be >= 0, got " +
                          std::to_string(stddev));
    }
    if (stddev == 0.0) return mean;
    // Box-Muller; u1 shifted into (0, 1] so log stays finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::split(std::uint64_t stream_index) const {
    return Rng(splitmix64(seed_ ^ (0xD1342543DE82EF95ull * (stream_index + 1))));
}

std::uint64_t stage_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t hash = 0xCBF29CE484222325ull;  // FNV-1a 64
    for (char c : tag) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001B3ull;
    }
    return seed ^ hash;
}

Tensor draw_normal(Rng& rng, const Shape& shape, double mean, double stddev) {
    if (stddev < 0.0) {
        throw DomainError("draw_normal: stddev must be >= 0, got " +
                          std::to_string(stddev));
    }
    Tensor out(shape);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = rng.next_normal(mean, stddev);
    }
    return out;
}

}  // namespace guardnet
