#include "gem/agent/tabular_gem.hpp"

#include "gem/core/objective.hpp"
#include "gem/ndiff/adam.hpp"
#include "gem/oracles/policy_search.hpp"

#include <cmath>

namespace gem::agent {

TabularGemResult train_tabular_gem(const oracles::TabularMdp& mdp, const ndiff::Tensor& k,
                                   const TabularGemConfig& config)
{
    mdp.validate();
    Rng rng(split_seed(config.seed, 0x7ab));
    const std::size_t n = mdp.n_states;
    const std::size_t a_n = mdp.n_actions;
    const std::size_t T = mdp.horizon;
    const std::size_t table = mdp.decision_steps() * n * a_n;

    ndiff::Tensor logits({table}, 0.0);
    ndiff::Tensor phi({n}, 0.0);
    ndiff::AdamState pi_opt = ndiff::AdamState::for_parameters(std::vector<const ndiff::Tensor*>{&logits},
                                                               {config.policy_lr, 0.0, 0.95, 1e-8});
    ndiff::AdamState g_opt =
        ndiff::AdamState::for_parameters(std::vector<const ndiff::Tensor*>{&phi}, {config.g_lr, 0.0, 0.95, 1e-8});

    TabularGemResult out;
    const std::size_t batch = config.episodes_per_step;
    std::vector<oracles::TabularEpisode> episodes(batch);
    std::vector<std::vector<double>> rewards(batch, std::vector<double>(T));
    for (std::size_t step = 0; step < config.steps; ++step) {
        const auto pol = oracles::TabularPolicy::softmax(mdp, logits.values());
        std::vector<double> g(n);
        for (std::size_t s = 0; s < n; ++s) {
            g[s] = std::exp(phi[s]);
        }
        for (auto& ep : episodes) {
            ep = oracles::sample_episode(mdp, pol, rng);
        }

        // Negatives: a uniformly drawn state from the rest of the batch.
        ndiff::Tensor g_grad({n}, 0.0);
        std::vector<double> baseline(T, 0.0);
        const double count = static_cast<double>(batch * T);
        for (std::size_t e = 0; e < batch; ++e) {
            for (std::size_t t = 0; t < T; ++t) {
                const auto& other = episodes[uniform_index(rng, batch)];
                const std::size_t xp = other.states[uniform_index(rng, T)];
                const std::size_t x = episodes[e].states[t];
                const double kk = k(x, xp);
                rewards[e][t] = core::intrinsic_reward(g[x], g[xp], kk);
                // d/dphi_x of [ln g(x) - k g(x)] is 1 - k g(x); descend the negative.
                g_grad[x] -= (1.0 - kk * g[x]) / count;
            }
        }
        // Per-timestep reward-to-go baseline.
        std::vector<std::vector<double>> to_go(batch, std::vector<double>(T, 0.0));
        for (std::size_t e = 0; e < batch; ++e) {
            double acc = 0.0;
            for (std::size_t t = T; t-- > 1;) {
                acc += rewards[e][t];
                to_go[e][t - 1] = acc;
            }
        }
        for (std::size_t t = 0; t + 1 < T; ++t) {
            for (std::size_t e = 0; e < batch; ++e) {
                baseline[t] += to_go[e][t] / static_cast<double>(batch);
            }
        }
        ndiff::Tensor pi_grad({table}, 0.0);
        for (std::size_t e = 0; e < batch; ++e) {
            const auto& ep = episodes[e];
            for (std::size_t t = 0; t + 1 < T; ++t) {
                const std::size_t row = (t * n + ep.states[t]) * a_n;
                const double adv = to_go[e][t] - baseline[t];
                for (std::size_t b = 0; b < a_n; ++b) {
                    const double score = (b == ep.actions[t] ? 1.0 : 0.0) - pol.probs[row + b];
                    pi_grad[row + b] -= score * adv / (static_cast<double>(T) * static_cast<double>(batch));
                }
            }
        }
        ndiff::Tensor* pi_params[] = {&logits};
        ndiff::Tensor* g_params[] = {&phi};
        ndiff::adam_step(pi_opt, pi_params, std::span<const ndiff::Tensor>(&pi_grad, 1));
        ndiff::adam_step(g_opt, g_params, std::span<const ndiff::Tensor>(&g_grad, 1));

        std::vector<double> g_now(n);
        for (std::size_t s = 0; s < n; ++s) {
            g_now[s] = std::exp(phi[s]);
        }
        const auto p = oracles::exact_visitation(mdp, oracles::TabularPolicy::softmax(mdp, logits.values()));
        out.objective_curve.push_back(core::gem_objective(p, k, g_now));
    }
    out.logits = logits.values();
    out.g.resize(n);
    for (std::size_t s = 0; s < n; ++s) {
        out.g[s] = std::exp(phi[s]);
    }
    out.policy = oracles::TabularPolicy::softmax(mdp, out.logits);
    out.entropy = oracles::visitation_entropy(mdp, out.policy, k);
    return out;
}

}  // namespace gem::agent
