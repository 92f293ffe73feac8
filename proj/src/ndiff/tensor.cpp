#include "gem/ndiff/tensor.hpp"

#include "gem/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace gem {

double standard_normal(Rng& rng)
{
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = uniform01(rng);
    while (u1 <= 0.0) {
        u1 = uniform01(rng);
    }
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace gem

namespace gem::ndiff {

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape)
{
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill)
{
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data))
{
    if (element_count(shape_) != data_.size()) {
        throw ShapeError("tensor data length " + std::to_string(data_.size())
                         + " does not match shape " + shape_string());
    }
}

Tensor Tensor::vector(std::initializer_list<double> values)
{
    return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, double fill)
{
    return Tensor({rows, cols}, fill);
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
{
    return Tensor({rows, cols}, std::move(data));
}

std::size_t Tensor::rows() const
{
    if (rank() != 2) {
        throw ShapeError("rows() on tensor of shape " + shape_string());
    }
    return shape_[0];
}

std::size_t Tensor::cols() const
{
    if (rank() != 2) {
        throw ShapeError("cols() on tensor of shape " + shape_string());
    }
    return shape_[1];
}

std::span<double> Tensor::row(std::size_t r)
{
    const std::size_t c = cols();
    return std::span<double>(data_).subspan(r * c, c);
}

std::span<const double> Tensor::row(std::size_t r) const
{
    const std::size_t c = cols();
    return std::span<const double>(data_).subspan(r * c, c);
}

void Tensor::fill(double value)
{
    std::fill(data_.begin(), data_.end(), value);
}

bool Tensor::all_finite() const noexcept
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const
{
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        if (i > 0) {
            s += "x";
        }
        s += std::to_string(shape_[i]);
    }
    return s + "]";
}

Tensor gather_rows(const Tensor& source, std::span<const std::size_t> indices)
{
    const std::size_t c = source.cols();
    Tensor out = Tensor::matrix(indices.size(), c);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto src = source.row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Tensor stack_rows(std::span<const std::vector<double>> rows)
{
    if (rows.empty()) {
        return Tensor::matrix(0, 0);
    }
    const std::size_t c = rows.front().size();
    Tensor out = Tensor::matrix(rows.size(), c);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != c) {
            throw ShapeError("stack_rows: ragged row " + std::to_string(i));
        }
        std::copy(rows[i].begin(), rows[i].end(), out.row(i).begin());
    }
    return out;
}

}  // namespace gem::ndiff
