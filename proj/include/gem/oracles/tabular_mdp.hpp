#pragma once

#include "gem/core/entropy.hpp"
#include "gem/random.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace gem::oracles {

using core::DiscreteDistribution;
using ndiff::Tensor;

class MdpError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Finite MDP with horizon T. States x_1..x_T are visited; actions are taken at steps 1..T-1.
struct TabularMdp {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::size_t horizon = 0;
    std::vector<double> transitions;  // [s][a][s']
    std::vector<double> initial;      // [s]

    double p(std::size_t s, std::size_t a, std::size_t next) const
    {
        return transitions[(s * n_actions + a) * n_states + next];
    }
    double& p(std::size_t s, std::size_t a, std::size_t next)
    {
        return transitions[(s * n_actions + a) * n_states + next];
    }

    std::size_t decision_steps() const noexcept { return horizon == 0 ? 0 : horizon - 1; }

    /// Throws MdpError unless every transition row and the initial distribution sum to 1.
    void validate() const;

    /// Dirichlet(1)-style random kernel and initial distribution.
    static TabularMdp random(std::size_t n_states, std::size_t n_actions, std::size_t horizon, Rng& rng);
    /// Deterministic chain: action 0 moves left, action 1 moves right (walls at the ends); starts at state 0.
    static TabularMdp chain(std::size_t n_states, std::size_t horizon);
};

/// Time-dependent tabular policy pi_t(a | s) for t in [0, decision_steps).
struct TabularPolicy {
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::size_t steps = 0;
    std::vector<double> probs;  // [t][s][a]

    double operator()(std::size_t t, std::size_t s, std::size_t a) const
    {
        return probs[(t * n_states + s) * n_actions + a];
    }
    double& operator()(std::size_t t, std::size_t s, std::size_t a)
    {
        return probs[(t * n_states + s) * n_actions + a];
    }

    static TabularPolicy uniform(const TabularMdp& mdp);
    /// Row-wise softmax of logits laid out like `probs`.
    static TabularPolicy softmax(const TabularMdp& mdp, std::span<const double> logits);
    void validate(const TabularMdp& mdp) const;
};

struct Visitation {
    std::vector<std::vector<double>> marginals;  // p_t for t = 1..T
    DiscreteDistribution average;                // (1/T) sum_t p_t
};

/// Forward dynamic programming over the horizon.
Visitation exact_visitation_detail(const TabularMdp& mdp, const TabularPolicy& policy);
DiscreteDistribution exact_visitation(const TabularMdp& mdp, const TabularPolicy& policy);

/// Samples one trajectory of states x_1..x_T and the actions a_1..a_{T-1} taken.
struct TabularEpisode {
    std::vector<std::size_t> states;
    std::vector<std::size_t> actions;
};
TabularEpisode sample_episode(const TabularMdp& mdp, const TabularPolicy& policy, Rng& rng);

/// Exact gradient of GEM_k(g, pi) = E_p[ln g] - E_{p,p}[k g(x)] + 1 (p = exact visitation) with
/// respect to softmax policy logits, by enumerating every trajectory. Intended for tiny MDPs
/// (throws above 10^6 trajectories).
std::vector<double> exact_gem_policy_gradient(const TabularMdp& mdp, std::span<const double> logits,
                                              const Tensor& k, std::span<const double> g);

/// GEM_k(g, pi) evaluated on the exact visitation of softmax(logits).
double exact_gem_policy_objective(const TabularMdp& mdp, std::span<const double> logits, const Tensor& k,
                                  std::span<const double> g);

}  // namespace gem::oracles
