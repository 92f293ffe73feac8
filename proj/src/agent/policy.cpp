#include "gem/agent/policy.hpp"

#include "gem/core/soft1hot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gem::agent {

PolicyValueNets::PolicyValueNets(PolicyShape shape, Mlp pi_net, Mlp v_net, double w_ent)
    : shape_(shape), pi_(std::move(pi_net)), v_(std::move(v_net)), w_ent_(w_ent)
{
    if (pi_.input_dim() != input_dim() || v_.input_dim() != input_dim()) {
        throw ndiff::DimensionError(0, "policy/value input width does not match the feature layout");
    }
    if (pi_.output_dim() != shape_.action_count || v_.output_dim() != 1) {
        throw ndiff::DimensionError(pi_.layers().size() - 1, "policy needs one logit per action, value one output");
    }
}

PolicyValueNets PolicyValueNets::create(PolicyShape shape, const std::vector<std::size_t>& hidden, double w_ent,
                                        Rng& rng)
{
    const std::size_t in = shape.observation_dim + shape.action_count + 1 + shape.time_buckets;
    std::vector<std::size_t> pw = hidden;
    pw.push_back(shape.action_count);
    std::vector<std::size_t> vw = hidden;
    vw.push_back(1);
    Mlp pi = Mlp::create(in, pw, ndiff::Activation::relu, ndiff::Activation::identity, rng);
    // Small final policy layer so the initial policy is close to uniform.
    for (double& w : pi.layers().back().weight.values()) {
        w *= 0.01;
    }
    Mlp v = Mlp::create(in, vw, ndiff::Activation::relu, ndiff::Activation::identity, rng);
    return PolicyValueNets(shape, std::move(pi), std::move(v), w_ent);
}

std::size_t PolicyValueNets::input_dim() const noexcept
{
    return shape_.observation_dim + shape_.action_count + 1 + shape_.time_buckets;
}

void PolicyValueNets::build_input(std::span<const double> observation, int prev_action, double prev_reward, int t,
                                  std::span<double> out) const
{
    if (observation.size() != shape_.observation_dim || out.size() != input_dim()) {
        throw ndiff::ShapeError("policy input layout mismatch");
    }
    std::copy(observation.begin(), observation.end(), out.begin());
    auto rest = out.subspan(shape_.observation_dim);
    std::fill(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(shape_.action_count), 0.0);
    if (prev_action >= 0) {
        rest[static_cast<std::size_t>(prev_action)] = 1.0;
    }
    rest[shape_.action_count] = prev_reward;
    if (shape_.time_buckets > 0) {
        core::soft1hot_into(static_cast<double>(t), 0.0, static_cast<double>(shape_.episode_length),
                            rest.subspan(shape_.action_count + 1));
    }
}

std::vector<double> PolicyValueNets::build_input(std::span<const double> observation, int prev_action,
                                                 double prev_reward, int t) const
{
    std::vector<double> out(input_dim());
    build_input(observation, prev_action, prev_reward, t, out);
    return out;
}

std::vector<double> PolicyValueNets::values(const Tensor& inputs) const
{
    return v_.forward(inputs).values();
}

std::vector<double> softmax(std::span<const double> logits)
{
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        total += p[i];
    }
    for (double& v : p) {
        v /= total;
    }
    return p;
}

std::size_t sample_action(std::span<const double> probs, Rng& rng)
{
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            return i;
        }
    }
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) {
            return i;
        }
    }
    return 0;
}

std::size_t greedy_action(std::span<const double> probs)
{
    return static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

}  // namespace gem::agent
