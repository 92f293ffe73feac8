#pragma once

#include "gem/ndiff/mlp.hpp"
#include "gem/random.hpp"

#include <span>
#include <vector>

namespace gem::agent {

using ndiff::Mlp;
using ndiff::Tensor;

struct PolicyShape {
    std::size_t observation_dim = 0;
    std::size_t action_count = 0;
    int episode_length = 1;
    std::size_t time_buckets = 16;  // soft one-hot width of the timestep feature

    friend bool operator==(const PolicyShape&, const PolicyShape&) = default;
};

/// Feed-forward actor and critic over [observation, one-hot previous action, previous
/// extrinsic reward, soft one-hot timestep].
class PolicyValueNets {
public:
    PolicyValueNets() = default;
    PolicyValueNets(PolicyShape shape, Mlp pi_net, Mlp v_net, double w_ent);

    static PolicyValueNets create(PolicyShape shape, const std::vector<std::size_t>& hidden, double w_ent, Rng& rng);

    const PolicyShape& shape() const noexcept { return shape_; }
    std::size_t input_dim() const noexcept;
    double w_ent() const noexcept { return w_ent_; }
    void set_w_ent(double w) noexcept { w_ent_ = w; }

    const Mlp& pi_net() const noexcept { return pi_; }
    Mlp& pi_net() noexcept { return pi_; }
    const Mlp& v_net() const noexcept { return v_; }
    Mlp& v_net() noexcept { return v_; }

    /// Writes the network input for one step. prev_action < 0 means "no previous action".
    void build_input(std::span<const double> observation, int prev_action, double prev_reward, int t,
                     std::span<double> out) const;
    std::vector<double> build_input(std::span<const double> observation, int prev_action, double prev_reward,
                                    int t) const;

    Tensor logits(const Tensor& inputs) const { return pi_.forward(inputs); }
    std::vector<double> values(const Tensor& inputs) const;

    friend bool operator==(const PolicyValueNets&, const PolicyValueNets&) = default;

private:
    PolicyShape shape_;
    Mlp pi_;
    Mlp v_;
    double w_ent_ = 0.0;
};

/// Numerically stable softmax of one logit row.
std::vector<double> softmax(std::span<const double> logits);

/// Inverse-CDF draw from `probs` using one uniform from `rng`.
std::size_t sample_action(std::span<const double> probs, Rng& rng);

/// Highest-probability action; ties go to the lowest index.
std::size_t greedy_action(std::span<const double> probs);

}  // namespace gem::agent
