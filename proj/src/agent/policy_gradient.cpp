#include "gem/agent/policy_gradient.hpp"

#include <cmath>
#include <stdexcept>

namespace gem::agent {

PolicyGradientResult policy_gradient_loss(const std::vector<Trace>& traces,
                                          const std::vector<std::vector<double>>& rewards,
                                          const PolicyValueNets& nets, bool with_gradients,
                                          const FrozenTargets* frozen)
{
    if (traces.size() != rewards.size()) {
        throw std::invalid_argument("one reward row per trace required");
    }
    std::size_t n = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (rewards[i].size() != traces[i].steps.size()) {
            throw std::invalid_argument("reward row length differs from its trace");
        }
        n += traces[i].steps.size();
    }
    if (n == 0) {
        throw std::invalid_argument("policy-gradient loss of an empty batch");
    }

    const std::size_t in_dim = nets.input_dim();
    const std::size_t a_n = nets.shape().action_count;
    Tensor inputs = Tensor::matrix(n, in_dim);
    Tensor boot_inputs = Tensor::matrix(traces.size(), in_dim);
    {
        std::size_t r = 0;
        for (std::size_t i = 0; i < traces.size(); ++i) {
            for (const auto& tr : traces[i].steps) {
                std::copy(tr.input.begin(), tr.input.end(), inputs.row(r++).begin());
            }
            if (!traces[i].steps.empty()) {
                const auto& last = traces[i].steps.back().next_input;
                std::copy(last.begin(), last.end(), boot_inputs.row(i).begin());
            }
        }
    }

    ndiff::MlpTape pi_tape;
    ndiff::MlpTape v_tape;
    const Tensor logits = with_gradients ? nets.pi_net().forward(inputs, pi_tape) : nets.pi_net().forward(inputs);
    const Tensor values = with_gradients ? nets.v_net().forward(inputs, v_tape) : nets.v_net().forward(inputs);
    const Tensor boot = nets.v_net().forward(boot_inputs);

    PolicyGradientResult out;
    out.returns.resize(n);
    out.advantages.resize(n);
    if (frozen != nullptr && (frozen->advantages.size() != n || frozen->returns.size() != n)) {
        throw std::invalid_argument("frozen targets do not match the batch");
    }
    Tensor d_logits = Tensor::matrix(n, a_n);
    Tensor d_values = Tensor::matrix(n, 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double w_ent = nets.w_ent();

    std::size_t offset = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& steps = traces[i].steps;
        const std::size_t len = steps.size();
        if (len == 0) {
            continue;
        }
        // next_v[t] = V(x_{t+1}); the last one bootstraps (0 at episode end).
        std::vector<double> next_v(len);
        for (std::size_t t = 0; t + 1 < len; ++t) {
            next_v[t] = values(offset + t + 1, 0);
        }
        next_v[len - 1] = steps.back().done ? 0.0 : boot(i, 0);

        for (std::size_t t = 0; t < len; ++t) {
            double partial = 0.0;
            double ret = 0.0;
            for (std::size_t j = t; j < len; ++j) {
                partial += rewards[i][j];
                ret += partial + next_v[j];
            }
            ret /= static_cast<double>(len - t);
            const std::size_t row = offset + t;
            const double v = values(row, 0);
            double advantage = rewards[i][t] + next_v[t] - v;
            if (frozen != nullptr) {
                ret = frozen->returns[row];
                advantage = frozen->advantages[row];
            }
            out.returns[row] = ret;
            out.advantages[row] = advantage;
            const auto probs = softmax(logits.row(row));
            const std::size_t a = steps[t].action;
            double h = 0.0;
            for (double p : probs) {
                if (p > 0.0) {
                    h -= p * std::log(p);
                }
            }
            out.ploss -= std::log(probs[a]) * advantage;
            out.vloss += (v - ret) * (v - ret);
            out.entropy += h;

            if (with_gradients) {
                for (std::size_t b = 0; b < a_n; ++b) {
                    const double onehot = b == a ? 1.0 : 0.0;
                    double g = inv_n * advantage * (probs[b] - onehot);
                    if (probs[b] > 0.0) {
                        g += w_ent * inv_n * probs[b] * (std::log(probs[b]) + h);
                    }
                    d_logits(row, b) = g;
                }
                d_values(row, 0) = 2.0 * inv_n * (v - ret);
            }
        }
        offset += len;
    }
    out.ploss *= inv_n;
    out.vloss *= inv_n;
    out.entropy *= inv_n;
    out.total = out.ploss + out.vloss - w_ent * out.entropy;

    if (with_gradients) {
        out.pi_grads = nets.pi_net().zero_gradients();
        nets.pi_net().backward(pi_tape, d_logits, out.pi_grads);
        out.v_grads = nets.v_net().zero_gradients();
        nets.v_net().backward(v_tape, d_values, out.v_grads);
    }
    return out;
}

}  // namespace gem::agent
