#include "gem/oracles/policy_search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gem::oracles {

namespace {

constexpr double profile_floor = 1e-300;

double entropy_of(std::span<const double> p, const Tensor& k)
{
    const std::size_t n = p.size();
    double h = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        if (p[x] <= 0.0) {
            continue;
        }
        double pk = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            pk += k(x, y) * p[y];
        }
        h -= p[x] * std::log(std::max(pk, profile_floor));
    }
    return h;
}

/// dH_k/dp(z) = -ln p_k(z) - sum_x p(x) k(x, z) / p_k(x).
std::vector<double> entropy_gradient(std::span<const double> p, const Tensor& k)
{
    const std::size_t n = p.size();
    std::vector<double> pk(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            pk[x] += k(x, y) * p[y];
        }
        pk[x] = std::max(pk[x], profile_floor);
    }
    std::vector<double> w(n);
    for (std::size_t z = 0; z < n; ++z) {
        double v = -std::log(pk[z]);
        for (std::size_t x = 0; x < n; ++x) {
            if (p[x] > 0.0) {
                v -= p[x] * k(x, z) / pk[x];
            }
        }
        w[z] = std::max(v, -1e6);
        w[z] = std::min(w[z], 1e6);
    }
    return w;
}

struct Flow {
    std::vector<std::vector<double>> d;   // state marginal per time, T entries
    std::vector<std::vector<double>> mu;  // state-action occupancy per decision step
    std::vector<double> average;
};

Flow flow_of(const TabularMdp& mdp, const TabularPolicy& pol)
{
    const std::size_t n = mdp.n_states;
    const std::size_t a_n = mdp.n_actions;
    Flow f;
    f.d.push_back(mdp.initial);
    for (std::size_t t = 0; t + 1 < mdp.horizon; ++t) {
        std::vector<double> mu(n * a_n, 0.0);
        std::vector<double> next(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t a = 0; a < a_n; ++a) {
                const double w = f.d[t][s] * pol(t, s, a);
                mu[s * a_n + a] = w;
                for (std::size_t s2 = 0; s2 < n; ++s2) {
                    next[s2] += w * mdp.p(s, a, s2);
                }
            }
        }
        f.mu.push_back(std::move(mu));
        f.d.push_back(std::move(next));
    }
    f.average.assign(n, 0.0);
    for (const auto& dt : f.d) {
        for (std::size_t s = 0; s < n; ++s) {
            f.average[s] += dt[s] / static_cast<double>(mdp.horizon);
        }
    }
    return f;
}

void mix(Flow& into, const Flow& other, double gamma)
{
    auto blend = [gamma](std::vector<double>& a, const std::vector<double>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = (1.0 - gamma) * a[i] + gamma * b[i];
        }
    };
    for (std::size_t t = 0; t < into.d.size(); ++t) {
        blend(into.d[t], other.d[t]);
    }
    for (std::size_t t = 0; t < into.mu.size(); ++t) {
        blend(into.mu[t], other.mu[t]);
    }
    blend(into.average, other.average);
}

TabularPolicy policy_of(const TabularMdp& mdp, const Flow& f)
{
    TabularPolicy pol = TabularPolicy::uniform(mdp);
    const std::size_t a_n = mdp.n_actions;
    for (std::size_t t = 0; t < f.mu.size(); ++t) {
        for (std::size_t s = 0; s < mdp.n_states; ++s) {
            double total = 0.0;
            for (std::size_t a = 0; a < a_n; ++a) {
                total += f.mu[t][s * a_n + a];
            }
            if (total <= 1e-300) {
                continue;
            }
            for (std::size_t a = 0; a < a_n; ++a) {
                pol(t, s, a) = f.mu[t][s * a_n + a] / total;
            }
        }
    }
    return pol;
}

/// Q_t(s, a) for per-visit reward w / T on states x_2..x_T, following `pol` afterwards.
/// With `greedy` the continuation maximises instead and `pol` is overwritten with the argmax.
std::vector<std::vector<double>> backward_q(const TabularMdp& mdp, TabularPolicy& pol, std::span<const double> w,
                                            bool greedy)
{
    const std::size_t n = mdp.n_states;
    const std::size_t a_n = mdp.n_actions;
    const std::size_t steps = mdp.decision_steps();
    const double inv_t = 1.0 / static_cast<double>(mdp.horizon);
    std::vector<std::vector<double>> q(steps, std::vector<double>(n * a_n, 0.0));
    std::vector<double> u(n, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
        std::vector<double> u_prev(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t a = 0; a < a_n; ++a) {
                double v = 0.0;
                for (std::size_t s2 = 0; s2 < n; ++s2) {
                    v += mdp.p(s, a, s2) * (w[s2] * inv_t + u[s2]);
                }
                q[t][s * a_n + a] = v;
            }
            if (greedy) {
                std::size_t best = 0;
                for (std::size_t a = 1; a < a_n; ++a) {
                    if (q[t][s * a_n + a] > q[t][s * a_n + best]) {
                        best = a;
                    }
                }
                for (std::size_t a = 0; a < a_n; ++a) {
                    pol(t, s, a) = a == best ? 1.0 : 0.0;
                }
            }
            for (std::size_t a = 0; a < a_n; ++a) {
                u_prev[s] += pol(t, s, a) * q[t][s * a_n + a];
            }
        }
        u = std::move(u_prev);
    }
    return q;
}

/// Maximises a concave function of gamma in [0, 1] by golden-section search.
double line_search(const std::function<double(double)>& f)
{
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = 1.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < 60; ++i) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        }
    }
    const double mid = 0.5 * (lo + hi);
    double best = mid;
    double best_v = f(mid);
    for (double cand : {0.0, 1.0}) {
        const double v = f(cand);
        if (v > best_v) {
            best_v = v;
            best = cand;
        }
    }
    return best;
}

double fw_gap(const TabularMdp& mdp, const std::vector<double>& p, const Tensor& k)
{
    const auto w = entropy_gradient(p, k);
    TabularPolicy vertex = TabularPolicy::uniform(mdp);
    backward_q(mdp, vertex, w, true);
    const Flow fv = flow_of(mdp, vertex);
    double gap = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        gap += w[x] * (fv.average[x] - p[x]);
    }
    return std::max(gap, 0.0);
}

TabularPolicy frank_wolfe(const TabularMdp& mdp, const Tensor& k, TabularPolicy start, std::size_t iterations)
{
    Flow cur = flow_of(mdp, start);
    for (std::size_t it = 0; it < iterations; ++it) {
        const auto w = entropy_gradient(cur.average, k);
        TabularPolicy vertex = TabularPolicy::uniform(mdp);
        backward_q(mdp, vertex, w, true);
        const Flow fv = flow_of(mdp, vertex);
        double gap = 0.0;
        for (std::size_t x = 0; x < w.size(); ++x) {
            gap += w[x] * (fv.average[x] - cur.average[x]);
        }
        if (gap < 1e-12) {
            break;
        }
        std::vector<double> trial(cur.average.size());
        const double gamma = line_search([&](double gmm) {
            for (std::size_t x = 0; x < trial.size(); ++x) {
                trial[x] = (1.0 - gmm) * cur.average[x] + gmm * fv.average[x];
            }
            return entropy_of(trial, k);
        });
        if (gamma == 0.0) {
            break;
        }
        mix(cur, fv, gamma);
    }
    return policy_of(mdp, cur);
}

TabularPolicy projected_ascent(const TabularMdp& mdp, const Tensor& k, TabularPolicy pol, std::size_t iterations)
{
    double value = visitation_entropy(mdp, pol, k);
    double step = 0.5;
    const std::size_t a_n = mdp.n_actions;
    for (std::size_t it = 0; it < iterations && step > 1e-12; ++it) {
        const auto grad = visitation_entropy_gradient(mdp, pol, k);
        TabularPolicy trial = pol;
        for (std::size_t i = 0; i < trial.probs.size(); ++i) {
            trial.probs[i] += step * grad[i];
        }
        for (std::size_t r = 0; r < trial.probs.size() / a_n; ++r) {
            project_to_simplex(std::span<double>(trial.probs).subspan(r * a_n, a_n));
        }
        const double v = visitation_entropy(mdp, trial, k);
        if (v > value) {
            pol = std::move(trial);
            value = v;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    return pol;
}

/// For each decision step, whether the state can carry mass under some policy.
std::vector<std::vector<bool>> reachable(const TabularMdp& mdp)
{
    std::vector<std::vector<bool>> out;
    std::vector<bool> cur(mdp.n_states);
    for (std::size_t s = 0; s < mdp.n_states; ++s) {
        cur[s] = mdp.initial[s] > 0.0;
    }
    for (std::size_t t = 0; t < mdp.decision_steps(); ++t) {
        out.push_back(cur);
        std::vector<bool> next(mdp.n_states, false);
        for (std::size_t s = 0; s < mdp.n_states; ++s) {
            if (!cur[s]) {
                continue;
            }
            for (std::size_t a = 0; a < mdp.n_actions; ++a) {
                for (std::size_t s2 = 0; s2 < mdp.n_states; ++s2) {
                    if (mdp.p(s, a, s2) > 0.0) {
                        next[s2] = true;
                    }
                }
            }
        }
        cur = std::move(next);
    }
    return out;
}

/// Every way of writing `units` as an ordered sum of `parts` non-negative integers.
void compositions(std::size_t units, std::size_t parts, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out)
{
    if (parts == 1) {
        cur.push_back(units);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (std::size_t u = 0; u <= units; ++u) {
        cur.push_back(u);
        compositions(units - u, parts - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

void project_to_simplex(std::span<double> v)
{
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - t > 0.0) {
            theta = t;
        }
    }
    for (double& x : v) {
        x = std::max(x - theta, 0.0);
    }
}

double visitation_entropy(const TabularMdp& mdp, const TabularPolicy& policy, const Tensor& k)
{
    const auto p = exact_visitation(mdp, policy);
    return entropy_of(p.probs(), k);
}

std::vector<double> visitation_entropy_gradient(const TabularMdp& mdp, const TabularPolicy& policy,
                                                const Tensor& k)
{
    const Flow f = flow_of(mdp, policy);
    const auto w = entropy_gradient(f.average, k);
    TabularPolicy pol = policy;
    const auto q = backward_q(mdp, pol, w, false);
    std::vector<double> grad(policy.probs.size());
    const std::size_t n = mdp.n_states;
    const std::size_t a_n = mdp.n_actions;
    for (std::size_t t = 0; t < q.size(); ++t) {
        for (std::size_t s = 0; s < n; ++s) {
            for (std::size_t a = 0; a < a_n; ++a) {
                grad[(t * n + s) * a_n + a] = f.d[t][s] * q[t][s * a_n + a];
            }
        }
    }
    return grad;
}

PolicySearchResult max_entropy_policy_search(const TabularMdp& mdp, const Tensor& k,
                                             const PolicySearchOptions& options)
{
    mdp.validate();
    if (k.rank() != 2 || k.rows() != mdp.n_states || k.cols() != mdp.n_states) {
        throw ndiff::ShapeError("similarity matrix does not match the MDP");
    }
    const std::size_t entries = mdp.n_states * mdp.n_actions * mdp.decision_steps();
    if (entries > options.max_table_entries) {
        throw SearchBoundExceeded("policy table of " + std::to_string(entries) + " entries exceeds the bound of "
                                  + std::to_string(options.max_table_entries));
    }
    if (!(options.grid_step > 0.0 && options.grid_step <= 1.0)) {
        throw std::invalid_argument("grid step must lie in (0, 1]");
    }

    PolicySearchResult best;
    best.entropy = -std::numeric_limits<double>::infinity();
    auto consider = [&](const TabularPolicy& pol) {
        const double h = visitation_entropy(mdp, pol, k);
        if (h > best.entropy) {
            best.entropy = h;
            best.policy = pol;
        }
    };

    // Simplex grid over the rows that can carry probability mass.
    const auto live = reachable(mdp);
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    for (std::size_t t = 0; t < live.size(); ++t) {
        for (std::size_t s = 0; s < mdp.n_states; ++s) {
            if (live[t][s]) {
                rows.emplace_back(t, s);
            }
        }
    }
    const auto units = static_cast<std::size_t>(std::llround(1.0 / options.grid_step));
    std::vector<std::vector<std::size_t>> simplex;
    std::vector<std::size_t> scratch;
    compositions(units, mdp.n_actions, scratch, simplex);
    double grid_count = std::pow(static_cast<double>(simplex.size()), static_cast<double>(rows.size()));
    if (grid_count <= static_cast<double>(options.max_grid_policies)) {
        best.grid_policies = static_cast<std::size_t>(grid_count);
        std::vector<std::size_t> odometer(rows.size(), 0);
        TabularPolicy pol = TabularPolicy::uniform(mdp);
        while (true) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto [t, s] = rows[r];
                for (std::size_t a = 0; a < mdp.n_actions; ++a) {
                    pol(t, s, a) = static_cast<double>(simplex[odometer[r]][a]) / static_cast<double>(units);
                }
            }
            consider(pol);
            std::size_t r = 0;
            while (r < rows.size() && ++odometer[r] == simplex.size()) {
                odometer[r] = 0;
                ++r;
            }
            if (r == rows.size()) {
                break;
            }
        }
    }

    // Continuous search from the uniform policy and random interior starts.
    Rng rng(split_seed(options.seed, 0x5eed));
    for (std::size_t restart = 0; restart <= options.restarts; ++restart) {
        TabularPolicy start = TabularPolicy::uniform(mdp);
        if (restart > 0) {
            for (std::size_t r = 0; r < start.probs.size() / mdp.n_actions; ++r) {
                double total = 0.0;
                for (std::size_t a = 0; a < mdp.n_actions; ++a) {
                    start.probs[r * mdp.n_actions + a] = -std::log(1.0 - uniform01(rng));
                    total += start.probs[r * mdp.n_actions + a];
                }
                for (std::size_t a = 0; a < mdp.n_actions; ++a) {
                    start.probs[r * mdp.n_actions + a] /= total;
                }
            }
        }
        TabularPolicy pol = frank_wolfe(mdp, k, std::move(start), options.frank_wolfe_iterations);
        pol = projected_ascent(mdp, k, std::move(pol), options.ascent_iterations);
        consider(pol);
    }
    best.policy = projected_ascent(mdp, k, best.policy, options.ascent_iterations);
    best.entropy = visitation_entropy(mdp, best.policy, k);
    best.gap = fw_gap(mdp, exact_visitation(mdp, best.policy).probs(), k);
    return best;
}

}  // namespace gem::oracles
