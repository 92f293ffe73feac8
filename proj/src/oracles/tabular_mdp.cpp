#include "gem/oracles/tabular_mdp.hpp"

#include "gem/core/objective.hpp"

#include <cmath>
#include <numeric>

namespace gem::oracles {

namespace {

void check_row(std::span<const double> row, const char* what)
{
    double total = 0.0;
    for (double v : row) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw MdpError(std::string(what) + " has a negative or non-finite entry");
        }
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw MdpError(std::string(what) + " sums to " + std::to_string(total));
    }
}

std::size_t draw(std::span<const double> probs, Rng& rng)
{
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) {
            return i;
        }
    }
    // Rounding left a sliver above the cumulative sum: take the last non-zero entry.
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) {
            return i;
        }
    }
    return probs.size() - 1;
}

}  // namespace

void TabularMdp::validate() const
{
    if (n_states == 0 || n_actions == 0 || horizon == 0) {
        throw MdpError("MDP needs states, actions and a positive horizon");
    }
    if (transitions.size() != n_states * n_actions * n_states || initial.size() != n_states) {
        throw MdpError("MDP tensor sizes are inconsistent");
    }
    check_row(initial, "initial distribution");
    for (std::size_t s = 0; s < n_states; ++s) {
        for (std::size_t a = 0; a < n_actions; ++a) {
            check_row(std::span<const double>(transitions).subspan((s * n_actions + a) * n_states, n_states),
                      "transition row");
        }
    }
}

TabularMdp TabularMdp::random(std::size_t n_states, std::size_t n_actions, std::size_t horizon, Rng& rng)
{
    TabularMdp mdp{n_states, n_actions, horizon, std::vector<double>(n_states * n_actions * n_states),
                   std::vector<double>(n_states)};
    auto fill_simplex = [&](std::span<double> row) {
        double total = 0.0;
        for (double& v : row) {
            v = -std::log(1.0 - uniform01(rng));  // Exp(1) draws normalise to Dirichlet(1)
            total += v;
        }
        for (double& v : row) {
            v /= total;
        }
    };
    fill_simplex(mdp.initial);
    for (std::size_t r = 0; r < n_states * n_actions; ++r) {
        fill_simplex(std::span<double>(mdp.transitions).subspan(r * n_states, n_states));
    }
    return mdp;
}

TabularMdp TabularMdp::chain(std::size_t n_states, std::size_t horizon)
{
    TabularMdp mdp{n_states, 2, horizon, std::vector<double>(n_states * 2 * n_states, 0.0),
                   std::vector<double>(n_states, 0.0)};
    mdp.initial[0] = 1.0;
    for (std::size_t s = 0; s < n_states; ++s) {
        mdp.p(s, 0, s == 0 ? 0 : s - 1) = 1.0;
        mdp.p(s, 1, s + 1 == n_states ? s : s + 1) = 1.0;
    }
    return mdp;
}

TabularPolicy TabularPolicy::uniform(const TabularMdp& mdp)
{
    const std::size_t steps = mdp.decision_steps();
    return {mdp.n_states, mdp.n_actions, steps,
            std::vector<double>(steps * mdp.n_states * mdp.n_actions, 1.0 / static_cast<double>(mdp.n_actions))};
}

TabularPolicy TabularPolicy::softmax(const TabularMdp& mdp, std::span<const double> logits)
{
    TabularPolicy pol = uniform(mdp);
    if (logits.size() != pol.probs.size()) {
        throw MdpError("logit count does not match the policy table");
    }
    const std::size_t a_n = mdp.n_actions;
    for (std::size_t r = 0; r < pol.probs.size() / a_n; ++r) {
        double mx = logits[r * a_n];
        for (std::size_t a = 1; a < a_n; ++a) {
            mx = std::max(mx, logits[r * a_n + a]);
        }
        double total = 0.0;
        for (std::size_t a = 0; a < a_n; ++a) {
            pol.probs[r * a_n + a] = std::exp(logits[r * a_n + a] - mx);
            total += pol.probs[r * a_n + a];
        }
        for (std::size_t a = 0; a < a_n; ++a) {
            pol.probs[r * a_n + a] /= total;
        }
    }
    return pol;
}

void TabularPolicy::validate(const TabularMdp& mdp) const
{
    if (n_states != mdp.n_states || n_actions != mdp.n_actions || steps != mdp.decision_steps()
        || probs.size() != steps * n_states * n_actions) {
        throw MdpError("policy table does not match the MDP");
    }
    for (std::size_t r = 0; r < steps * n_states; ++r) {
        check_row(std::span<const double>(probs).subspan(r * n_actions, n_actions), "policy row");
    }
}

Visitation exact_visitation_detail(const TabularMdp& mdp, const TabularPolicy& policy)
{
    mdp.validate();
    policy.validate(mdp);
    const std::size_t n = mdp.n_states;
    Visitation out;
    out.marginals.push_back(mdp.initial);
    for (std::size_t t = 0; t + 1 < mdp.horizon; ++t) {
        const auto& cur = out.marginals.back();
        std::vector<double> next(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (cur[s] == 0.0) {
                continue;
            }
            for (std::size_t a = 0; a < mdp.n_actions; ++a) {
                const double w = cur[s] * policy(t, s, a);
                for (std::size_t s2 = 0; s2 < n; ++s2) {
                    next[s2] += w * mdp.p(s, a, s2);
                }
            }
        }
        const double total = std::accumulate(next.begin(), next.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::logic_error("visitation marginal lost mass");
        }
        out.marginals.push_back(std::move(next));
    }
    std::vector<double> avg(n, 0.0);
    for (const auto& m : out.marginals) {
        for (std::size_t s = 0; s < n; ++s) {
            avg[s] += m[s] / static_cast<double>(mdp.horizon);
        }
    }
    out.average = DiscreteDistribution::from_weights(avg);
    return out;
}

DiscreteDistribution exact_visitation(const TabularMdp& mdp, const TabularPolicy& policy)
{
    return exact_visitation_detail(mdp, policy).average;
}

TabularEpisode sample_episode(const TabularMdp& mdp, const TabularPolicy& policy, Rng& rng)
{
    TabularEpisode ep;
    std::size_t s = draw(mdp.initial, rng);
    ep.states.push_back(s);
    for (std::size_t t = 0; t + 1 < mdp.horizon; ++t) {
        const std::size_t a = draw(std::span<const double>(policy.probs).subspan(
                                       (t * mdp.n_states + s) * mdp.n_actions, mdp.n_actions),
                                   rng);
        s = draw(std::span<const double>(mdp.transitions).subspan((s * mdp.n_actions + a) * mdp.n_states,
                                                                   mdp.n_states),
                 rng);
        ep.actions.push_back(a);
        ep.states.push_back(s);
    }
    return ep;
}

double exact_gem_policy_objective(const TabularMdp& mdp, std::span<const double> logits, const Tensor& k,
                                  std::span<const double> g)
{
    const auto p = exact_visitation(mdp, TabularPolicy::softmax(mdp, logits));
    return core::gem_objective(p, k, g);
}

std::vector<double> exact_gem_policy_gradient(const TabularMdp& mdp, std::span<const double> logits,
                                              const Tensor& k, std::span<const double> g)
{
    mdp.validate();
    const TabularPolicy pol = TabularPolicy::softmax(mdp, logits);
    const std::size_t n = mdp.n_states;
    const std::size_t a_n = mdp.n_actions;
    const std::size_t T = mdp.horizon;
    const double count = std::pow(static_cast<double>(n * a_n), static_cast<double>(T - 1)) * static_cast<double>(n);
    if (count > 1e6) {
        throw MdpError("trajectory enumeration limited to 10^6 trajectories");
    }

    // p(x) = (1/T) sum_traj P(traj) sum_t 1(x_t = x), so
    // dp(x)/dtheta = (1/T) sum_traj P(traj) (sum_t 1(x_t = x)) sum_t dlog pi(a_t | x_t)/dtheta.
    std::vector<double> p(n, 0.0);
    std::vector<double> dp(n * logits.size(), 0.0);
    std::vector<std::size_t> states(T);
    std::vector<std::size_t> actions(T > 0 ? T - 1 : 0);
    std::vector<double> score(logits.size());

    auto visit = [&](double prob) {
        std::fill(score.begin(), score.end(), 0.0);
        for (std::size_t t = 0; t + 1 < T; ++t) {
            const std::size_t row = (t * n + states[t]) * a_n;
            for (std::size_t b = 0; b < a_n; ++b) {
                score[row + b] += (b == actions[t] ? 1.0 : 0.0) - pol.probs[row + b];
            }
        }
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t x = states[t];
            p[x] += prob / static_cast<double>(T);
            for (std::size_t j = 0; j < score.size(); ++j) {
                dp[x * score.size() + j] += prob * score[j] / static_cast<double>(T);
            }
        }
    };

    // Depth-first enumeration of (x_1, a_1, x_2, ..., x_T).
    auto recurse = [&](auto&& self, std::size_t t, double prob) -> void {
        if (prob == 0.0) {
            return;
        }
        if (t + 1 == T) {
            visit(prob);
            return;
        }
        for (std::size_t a = 0; a < a_n; ++a) {
            const double pa = pol(t, states[t], a);
            for (std::size_t s2 = 0; s2 < n; ++s2) {
                actions[t] = a;
                states[t + 1] = s2;
                self(self, t + 1, prob * pa * mdp.p(states[t], a, s2));
            }
        }
    };
    for (std::size_t s0 = 0; s0 < n; ++s0) {
        states[0] = s0;
        recurse(recurse, 0, mdp.initial[s0]);
    }

    // dGEM/dp(x) = ln g(x) - sum_x' p(x') k(x, x') g(x) - sum_x' p(x') k(x', x) g(x').
    std::vector<double> weight(n);
    for (std::size_t x = 0; x < n; ++x) {
        double w = std::log(g[x]);
        for (std::size_t y = 0; y < n; ++y) {
            w -= p[y] * (k(x, y) * g[x] + k(y, x) * g[y]);
        }
        weight[x] = w;
    }
    std::vector<double> grad(logits.size(), 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t j = 0; j < grad.size(); ++j) {
            grad[j] += weight[x] * dp[x * grad.size() + j];
        }
    }
    return grad;
}

}  // namespace gem::oracles
