#pragma once

#include "gem/oracles/tabular_mdp.hpp"

#include <span>
#include <vector>

namespace gem::agent {

/// One-episode score-function estimate of the policy gradient of GEM_k(g, pi) for softmax
/// policy logits:
///   (1/T) sum_t grad ln pi(a_t | x_t, t) sum_{tau > t} r_tau,
/// where rewards[tau] belongs to state x_tau of the episode. The 1/T factor matches the
/// time-averaged visitation p^pi = (1/T) sum_t p_t, making the estimate unbiased.
std::vector<double> reinforce_gem_gradient(const oracles::TabularMdp& mdp, std::span<const double> logits,
                                           const oracles::TabularEpisode& episode, std::span<const double> rewards);

struct GradientEstimate {
    std::vector<double> mean;
    std::vector<double> std_error;
    std::size_t samples = 0;
};

/// Averages reinforce_gem_gradient over `episodes` episodes with
/// r_tau = ln g(x_tau) - k(x_tau, x'_tau) (g(x_tau) + g(x'_tau)), x'_tau drawn from p^pi by an
/// independent episode and a uniform timestep.
GradientEstimate estimate_gem_policy_gradient(const oracles::TabularMdp& mdp, std::span<const double> logits,
                                              const ndiff::Tensor& k, std::span<const double> g,
                                              std::size_t episodes, Rng& rng);

}  // namespace gem::agent
