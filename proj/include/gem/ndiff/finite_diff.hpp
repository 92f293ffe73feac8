#pragma once

#include "gem/ndiff/mlp.hpp"
#include "gem/ndiff/tensor.hpp"

#include <functional>
#include <span>

namespace gem::ndiff {

/// Central differences, one coordinate at a time. Parameters are restored afterwards.
Gradients finite_diff_grad(const std::function<double()>& loss, std::span<Tensor* const> params,
                           double eps);

/// |a - b| / max(|a|, |b|, floor), maximised over every coordinate.
double max_relative_error(std::span<const Tensor> a, std::span<const Tensor> b,
                          double floor = 1e-6);

}  // namespace gem::ndiff
