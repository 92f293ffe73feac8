#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gem::ndiff {

/// Dense row-major array of doubles. Rank 1 and rank 2 cover everything in this library.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    static Tensor vector(std::initializer_list<double> values);
    static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t rows() const;
    std::size_t cols() const;

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::vector<double>& values() noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    std::span<double> row(std::size_t r);
    std::span<const double> row(std::size_t r) const;

    void fill(double value);
    bool all_finite() const noexcept;
    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

    std::string shape_string() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// Rows `indices` of a rank-2 tensor, in order.
Tensor gather_rows(const Tensor& source, std::span<const std::size_t> indices);

/// Stack equal-length rows into a matrix.
Tensor stack_rows(std::span<const std::vector<double>> rows);

class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gem::ndiff
