#pragma once

#include "spikefed/common/error.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spikefed::numerics {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape) noexcept;
std::string to_string(const Shape& shape);

/// Shape disagreements between operands or against a declared layout.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A NaN or infinity produced (or supplied) where finite values are required.
class NonFiniteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense row-major tensor of doubles.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> data);

    static Tensor scalar(double v) { return Tensor(Shape{}, std::vector<double>{v}); }
    static Tensor vector(std::vector<double> v) {
        const auto n = v.size();
        return Tensor(Shape{n}, std::move(v));
    }

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t rank() const noexcept { return shape_.size(); }
    [[nodiscard]] std::size_t dim(std::size_t axis) const;
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }
    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    /// Scalar value of a one-element tensor.
    [[nodiscard]] double item() const;

    /// Same data, new shape with the same element count.
    [[nodiscard]] Tensor reshaped(Shape shape) const;

    [[nodiscard]] bool all_finite() const noexcept;
    /// Throws NonFiniteError naming `what` when any element is NaN/Inf.
    void require_finite(const char* what) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Bit-level equality (distinguishes -0.0 from 0.0).
bool bit_equal(const Tensor& a, const Tensor& b) noexcept;

}  // namespace spikefed::numerics
