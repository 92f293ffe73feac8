#pragma once

#include "gem/ndiff/mlp.hpp"

#include <functional>
#include <stdexcept>

namespace gem::ndiff {

class NonScalarLoss : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A loss evaluated on network outputs: its value and d(value)/d(output).
struct OutputLoss {
    Tensor value;  // must hold exactly one element
    Tensor grad_output;
};

struct GradResult {
    double value = 0.0;
    Gradients grads;  // layout of Mlp::parameters()
};

/// Reverse-mode gradient of loss(net(input)) with respect to the network parameters.
GradResult grad(const Mlp& net, const Tensor& input, const std::function<OutputLoss(const Tensor&)>& loss);

}  // namespace gem::ndiff
