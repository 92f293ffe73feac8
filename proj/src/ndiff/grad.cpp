#include "gem/ndiff/grad.hpp"

namespace gem::ndiff {

GradResult grad(const Mlp& net, const Tensor& input, const std::function<OutputLoss(const Tensor&)>& loss)
{
    MlpTape tape;
    const Tensor out = net.forward(input, tape);
    const OutputLoss l = loss(out);
    if (l.value.size() != 1) {
        throw NonScalarLoss("loss must be a scalar, got " + std::to_string(l.value.size()) + " values");
    }
    GradResult r;
    r.value = l.value[0];
    r.grads = net.zero_gradients();
    net.backward(tape, l.grad_output, r.grads);
    return r;
}

}  // namespace gem::ndiff
