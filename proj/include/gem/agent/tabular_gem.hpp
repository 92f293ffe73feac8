#pragma once

#include "gem/oracles/tabular_mdp.hpp"

#include <cstdint>
#include <vector>

namespace gem::agent {

struct TabularGemConfig {
    std::size_t steps = 2000;
    std::size_t episodes_per_step = 64;
    double policy_lr = 0.05;
    double g_lr = 0.05;
    std::uint64_t seed = 0;
};

struct TabularGemResult {
    std::vector<double> logits;  // softmax policy table, TabularPolicy layout
    std::vector<double> g;
    oracles::TabularPolicy policy;
    double entropy = 0.0;                 // exact H_k of the final policy's visitation
    std::vector<double> objective_curve;  // exact GEM_k(g, pi) after every step
};

/// Joint sample-based ascent on GEM_k(g, pi) for a tabular softmax policy and tabular
/// g = exp(phi): g follows the minibatch objective, the policy follows the score-function
/// gradient with rewards ln g(x) - k(x, x') (g(x) + g(x')) and a per-timestep mean baseline.
TabularGemResult train_tabular_gem(const oracles::TabularMdp& mdp, const ndiff::Tensor& k,
                                   const TabularGemConfig& config);

}  // namespace gem::agent
