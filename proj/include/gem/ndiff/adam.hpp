#pragma once

#include "gem/ndiff/mlp.hpp"
#include "gem/ndiff/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gem::ndiff {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.0;
    double beta2 = 0.95;
    double epsilon = 1e-8;
};

/// Optimizer state for one parameter list. Moments mirror the parameter shapes.
struct AdamState {
    AdamConfig config;
    std::vector<Tensor> first_moment;
    std::vector<Tensor> second_moment;
    std::uint64_t step_count = 0;

    static AdamState for_parameters(std::span<const Tensor* const> params, AdamConfig config = {});
    static AdamState for_network(const Mlp& net, AdamConfig config = {});
};

/// One bias-corrected Adam update: p -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(AdamState& state, std::span<Tensor* const> params, std::span<const Tensor> grads);

/// Convenience overload for a whole network.
void adam_step(AdamState& state, Mlp& net, const Gradients& grads);

}  // namespace gem::ndiff
