#include "gem/agent/reinforce.hpp"

#include "gem/core/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace gem::agent {

std::vector<double> reinforce_gem_gradient(const oracles::TabularMdp& mdp, std::span<const double> logits,
                                           const oracles::TabularEpisode& episode, std::span<const double> rewards)
{
    const auto pol = oracles::TabularPolicy::softmax(mdp, logits);
    if (episode.states.size() != mdp.horizon || rewards.size() != mdp.horizon
        || episode.actions.size() + 1 != mdp.horizon) {
        throw std::invalid_argument("episode does not span the MDP horizon");
    }
    const std::size_t n = mdp.n_states;
    const std::size_t a_n = mdp.n_actions;
    std::vector<double> grad(logits.size(), 0.0);
    double to_go = 0.0;
    for (std::size_t t = mdp.horizon - 1; t-- > 0;) {
        to_go += rewards[t + 1];
        const std::size_t row = (t * n + episode.states[t]) * a_n;
        for (std::size_t b = 0; b < a_n; ++b) {
            const double score = (b == episode.actions[t] ? 1.0 : 0.0) - pol.probs[row + b];
            grad[row + b] += score * to_go / static_cast<double>(mdp.horizon);
        }
    }
    return grad;
}

GradientEstimate estimate_gem_policy_gradient(const oracles::TabularMdp& mdp, std::span<const double> logits,
                                              const ndiff::Tensor& k, std::span<const double> g,
                                              std::size_t episodes, Rng& rng)
{
    if (episodes < 2) {
        throw std::invalid_argument("need at least two episodes for a standard error");
    }
    const auto pol = oracles::TabularPolicy::softmax(mdp, logits);
    const std::size_t dim = logits.size();
    std::vector<double> sum(dim, 0.0);
    std::vector<double> sum_sq(dim, 0.0);
    std::vector<double> rewards(mdp.horizon);
    for (std::size_t e = 0; e < episodes; ++e) {
        const auto ep = oracles::sample_episode(mdp, pol, rng);
        for (std::size_t tau = 0; tau < mdp.horizon; ++tau) {
            const auto other = oracles::sample_episode(mdp, pol, rng);
            const std::size_t xp = other.states[uniform_index(rng, mdp.horizon)];
            const std::size_t x = ep.states[tau];
            rewards[tau] = core::intrinsic_reward(g[x], g[xp], k(x, xp));
        }
        const auto est = reinforce_gem_gradient(mdp, logits, ep, rewards);
        for (std::size_t j = 0; j < dim; ++j) {
            sum[j] += est[j];
            sum_sq[j] += est[j] * est[j];
        }
    }
    GradientEstimate out;
    out.samples = episodes;
    out.mean.resize(dim);
    out.std_error.resize(dim);
    const double n = static_cast<double>(episodes);
    for (std::size_t j = 0; j < dim; ++j) {
        out.mean[j] = sum[j] / n;
        const double var = std::max(0.0, (sum_sq[j] - n * out.mean[j] * out.mean[j]) / (n - 1.0));
        out.std_error[j] = std::sqrt(var / n);
    }
    return out;
}

}  // namespace gem::agent
