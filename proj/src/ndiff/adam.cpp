#include "gem/ndiff/adam.hpp"

#include <cmath>
#include <string>

namespace gem::ndiff {

AdamState AdamState::for_parameters(std::span<const Tensor* const> params, AdamConfig config)
{
    AdamState s;
    s.config = config;
    for (const Tensor* p : params) {
        s.first_moment.emplace_back(p->shape(), 0.0);
        s.second_moment.emplace_back(p->shape(), 0.0);
    }
    return s;
}

AdamState AdamState::for_network(const Mlp& net, AdamConfig config)
{
    const auto params = net.parameters();
    return for_parameters(params, config);
}

void adam_step(AdamState& state, std::span<Tensor* const> params, std::span<const Tensor> grads)
{
    if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
        throw ShapeError("adam_step: " + std::to_string(params.size()) + " parameters, "
                         + std::to_string(grads.size()) + " gradients, "
                         + std::to_string(state.first_moment.size()) + " moment slots");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(grads[i]) || !params[i]->same_shape(state.first_moment[i])) {
            throw ShapeError("adam_step: parameter " + std::to_string(i) + " has shape "
                             + params[i]->shape_string() + ", gradient "
                             + grads[i].shape_string());
        }
    }
    const AdamConfig& c = state.config;
    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(c.beta1, t);
    const double correction2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i]->values();
        const auto& g = grads[i].values();
        auto& m = state.first_moment[i].values();
        auto& v = state.second_moment[i].values();
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
            v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
            const double m_hat = m[j] / correction1;
            const double v_hat = v[j] / correction2;
            p[j] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
        }
    }
}

void adam_step(AdamState& state, Mlp& net, const Gradients& grads)
{
    const auto params = net.parameters();
    adam_step(state, params, grads);
}

}  // namespace gem::ndiff
