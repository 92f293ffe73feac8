// Acceptance suite: one pass/fail line per criterion. Run with criterion numbers to select a
// subset, e.g. `acceptance 1 3 12`.

#include "gem/agent/reinforce.hpp"
#include "gem/agent/policy_gradient.hpp"
#include "gem/agent/rollout.hpp"
#include "gem/agent/tabular_gem.hpp"
#include "gem/agent/trainer.hpp"
#include "gem/cli/config.hpp"
#include "gem/cli/experiments.hpp"
#include "gem/cli/smoothing.hpp"
#include "gem/core/ar_loss.hpp"
#include "gem/core/gem_loss.hpp"
#include "gem/core/objective.hpp"
#include "gem/ndiff/adam.hpp"
#include "gem/ndiff/finite_diff.hpp"
#include "gem/oracles/collapse.hpp"
#include "gem/oracles/policy_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace gem;
using ndiff::Tensor;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0 means no limit
    std::function<Verdict()> run;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

core::DiscreteDistribution random_distribution(std::size_t n, Rng& rng)
{
    std::vector<double> w(n);
    for (double& v : w) {
        v = 0.05 + uniform01(rng);
    }
    return core::DiscreteDistribution::from_weights(w);
}

Tensor gaussian_profile(std::size_t n, double width)
{
    Tensor k = Tensor::matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = static_cast<double>(i) - static_cast<double>(j);
            k(i, j) = std::exp(-d * d / (2.0 * width * width));
        }
    }
    return k;
}

// Adam ascent on tabular g = exp(phi) using exact expectations.
std::vector<double> ascend_tabular_g(const core::DiscreteDistribution& p, const Tensor& k, double alpha,
                                     std::size_t iterations)
{
    const std::size_t n = p.size();
    Tensor phi({n}, 0.0);
    auto opt = ndiff::AdamState::for_parameters(std::vector<const Tensor*>{&phi}, {0.05, 0.9, 0.999, 1e-12});
    std::vector<double> g(n);
    for (std::size_t it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            g[i] = std::exp(phi[i]);
        }
        const auto dg = alpha == 1.0 ? core::gem_objective_gradient(p, k, g)
                                     : core::tsallis_gem_objective_gradient(p, k, g, alpha);
        Tensor step({n});
        for (std::size_t i = 0; i < n; ++i) {
            step[i] = -dg[i] * g[i];  // Adam minimises
        }
        ndiff::adam_step(opt, std::vector<Tensor*>{&phi}, std::vector<Tensor>{step});
    }
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = std::exp(phi[i]);
    }
    return g;
}

double max_condition_error(const core::DiscreteDistribution& p, const Tensor& k, const std::vector<double>& g)
{
    const auto pk = core::similarity_profile(p, k);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        worst = std::max(worst, std::abs(g[i] * pk[i] - 1.0));
    }
    return worst;
}

void jitter(ndiff::Mlp& net, Rng& rng, double amount)
{
    for (Tensor* t : net.parameters()) {
        for (double& v : t->values()) {
            v += uniform(rng, -amount, amount);
        }
    }
}

Tensor random_inputs(std::size_t rows, std::size_t cols, Rng& rng)
{
    Tensor t = Tensor::matrix(rows, cols);
    for (double& v : t.values()) {
        v = uniform(rng, -1.0, 1.0);
    }
    return t;
}

// ---------------------------------------------------------------------------------------------

Verdict maximiser_recovery()
{
    Rng rng(101);
    const Tensor k = gaussian_profile(8, 1.0);
    double worst_condition = 0.0;
    double worst_identity = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_distribution(8, rng);
        const auto g = ascend_tabular_g(p, k, 1.0, 4000);
        worst_condition = std::max(worst_condition, max_condition_error(p, k, g));
        const auto pk = core::similarity_profile(p, k);
        std::vector<double> star(8);
        std::transform(pk.begin(), pk.end(), star.begin(), [](double v) { return 1.0 / v; });
        worst_identity = std::max(worst_identity, std::abs(core::gem_objective(p, k, star) - core::gait_entropy(p, k)));
    }
    return {worst_condition < 0.05 && worst_identity < 1e-10,
            fmt("max |g p_k - 1| = %.2e (< 0.05), max |GEM(1/p_k) - H_k| = %.2e (< 1e-10)", worst_condition,
                worst_identity)};
}

Verdict discrete_recovery()
{
    Rng rng(202);
    double worst = 0.0;
    for (std::size_t n = 2; n <= 16; ++n) {
        const auto p = random_distribution(n, rng);
        const auto k = core::indicator_similarity(n);
        const auto g = ascend_tabular_g(p, k, 1.0, 4000);
        worst = std::max(worst, std::abs(core::gem_objective(p, k, g) - core::shannon_entropy(p)));
    }

    // Joint maximisation over g and a learned embedding f of four one-hot points.
    core::GemHyper hyper;
    hyper.c = 1.0;
    hyper.n_neg = 16;
    hyper.w_reg = 1e-4;
    auto model = core::GemModel::create(4, {32}, 4, {32, 8}, hyper, rng);
    const auto p = random_distribution(4, rng);
    const ndiff::AdamConfig adam{3e-3, 0.0, 0.95, 1e-8};
    auto g_opt = ndiff::AdamState::for_network(model.g_net(), adam);
    auto f_opt = ndiff::AdamState::for_network(model.f_net(), adam);
    auto batch = [&](std::size_t rows) {
        Tensor x = Tensor::matrix(rows, 4);
        for (std::size_t r = 0; r < rows; ++r) {
            double u = uniform01(rng);
            std::size_t s = 0;
            while (s + 1 < 4 && u >= p[s]) {
                u -= p[s];
                ++s;
            }
            x(r, s) = 1.0;
        }
        return core::GemBatch::same(x);
    };
    for (int step = 0; step < 3000; ++step) {
        const auto res = core::gem_loss_minibatch(model, batch(64), batch(64), rng);
        ndiff::adam_step(g_opt, model.g_net(), res.g_grads);
        ndiff::adam_step(f_opt, model.f_net(), res.f_grads);
    }
    const Tensor eye = Tensor::matrix(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
    double off = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            if (i != j) {
                off += model.similarity(eye, i, eye, j) / 12.0;
            }
        }
    }
    return {worst < 1e-3 && off < 0.05,
            fmt("max |GEM* - H| over n = 2..16: %.2e (< 1e-3), mean off-diagonal learned k = %.4f (< 0.05)", worst, off)};
}

Verdict gradient_exactness()
{
    double gem_err = 0.0;
    double ar_err = 0.0;
    double pg_err = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(3000 + seed);
        core::GemHyper hyper;
        hyper.c = 0.8;
        hyper.w_reg = 0.05;
        hyper.n_neg = 4;
        auto model = core::GemModel::create(5, {8, 6}, 5, {8, 3}, hyper, rng);
        jitter(model.g_net(), rng, 0.1);
        jitter(model.f_net(), rng, 0.1);
        const auto b1 = core::GemBatch::same(random_inputs(4, 5, rng));
        const auto b2 = core::GemBatch::same(random_inputs(6, 5, rng));
        const auto neg = core::sample_negatives(4, 6, 4, rng);
        const auto r = core::gem_loss_minibatch(model, b1, b2, neg);
        auto gem_value = [&] { return core::gem_loss_minibatch(model, b1, b2, neg, false).minimized; };
        gem_err = std::max({gem_err,
                            ndiff::max_relative_error(r.g_grads, ndiff::finite_diff_grad(gem_value, model.g_net().parameters(), 1e-5)),
                            ndiff::max_relative_error(r.f_grads, ndiff::finite_diff_grad(gem_value, model.f_net().parameters(), 1e-5))});

        const Tensor from = random_inputs(6, 5, rng);
        const Tensor to = random_inputs(6, 5, rng);
        const core::ArConfig ar{4.0, 0.5 + uniform01(rng), 1.0};
        const auto a = core::ar_loss(model, from, to, ar);
        ar_err = std::max(ar_err, ndiff::max_relative_error(
                                      a.f_grads, ndiff::finite_diff_grad([&] { return core::ar_loss(model, from, to, ar, false).value; },
                                                                         model.f_net().parameters(), 1e-5)));

        auto nets = agent::PolicyValueNets::create(agent::PolicyShape{3, 4, 6, 3}, {8, 6}, 0.05, rng);
        jitter(nets.pi_net(), rng, 0.2);
        jitter(nets.v_net(), rng, 0.2);
        std::vector<agent::Trace> traces;
        std::vector<std::vector<double>> rewards;
        for (int i = 0; i < 3; ++i) {
            agent::Trace tr;
            const std::size_t len = 2 + uniform_index(rng, 4);
            std::vector<double> row;
            for (std::size_t t = 0; t < len; ++t) {
                agent::Transition s;
                std::vector<double> o(3);
                std::vector<double> o2(3);
                for (std::size_t d = 0; d < 3; ++d) {
                    o[d] = uniform01(rng);
                    o2[d] = uniform01(rng);
                }
                s.action = uniform_index(rng, 4);
                s.input = nets.build_input(o, -1, 0.0, static_cast<int>(t));
                s.next_input = nets.build_input(o2, static_cast<int>(s.action), 0.0, static_cast<int>(t + 1));
                s.done = t + 1 == len && i == 0;
                tr.steps.push_back(std::move(s));
                row.push_back(uniform(rng, -1.0, 1.0));
            }
            traces.push_back(std::move(tr));
            rewards.push_back(std::move(row));
        }
        const auto pg = agent::policy_gradient_loss(traces, rewards, nets);
        const agent::FrozenTargets frozen{pg.advantages, pg.returns};
        auto pg_value = [&] { return agent::policy_gradient_loss(traces, rewards, nets, false, &frozen).total; };
        pg_err = std::max({pg_err,
                           ndiff::max_relative_error(pg.pi_grads, ndiff::finite_diff_grad(pg_value, nets.pi_net().parameters(), 1e-5)),
                           ndiff::max_relative_error(pg.v_grads, ndiff::finite_diff_grad(pg_value, nets.v_net().parameters(), 1e-5))});
    }
    return {gem_err < 1e-4 && ar_err < 1e-4 && pg_err < 1e-4,
            fmt("max relative error over 20 instances: GEM %.2e, AR %.2e, PG %.2e (< 1e-4)", gem_err, ar_err, pg_err)};
}

Verdict unbiased_policy_gradient()
{
    Rng rng(404);
    double worst_z = 0.0;
    for (int instance = 0; instance < 3; ++instance) {
        const auto mdp = oracles::TabularMdp::random(2, 2, 2, rng);
        std::vector<double> logits(4);
        for (double& l : logits) {
            l = uniform(rng, -1.0, 1.0);
        }
        const std::vector<double> g{uniform(rng, 0.5, 3.0), uniform(rng, 0.5, 3.0)};
        const double off = uniform(rng, 0.0, 0.8);
        const Tensor k = Tensor::matrix(2, 2, {1.0, off, off, 1.0});
        const auto exact = oracles::exact_gem_policy_gradient(mdp, logits, k, g);
        const auto est = agent::estimate_gem_policy_gradient(mdp, logits, k, g, 100000, rng);
        for (std::size_t i = 0; i < exact.size(); ++i) {
            const double se = est.std_error[i];
            const double diff = std::abs(est.mean[i] - exact[i]);
            worst_z = std::max(worst_z, se > 0.0 ? diff / se : (diff > 1e-12 ? INFINITY : 0.0));
        }
    }
    return {worst_z <= 3.0, fmt("max |estimate - exact| / SE over 3 MDPs = %.2f (<= 3)", worst_z)};
}

Verdict tsallis_consistency()
{
    Rng rng(505);
    double worst_limit = 0.0;
    double worst_condition = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + uniform_index(rng, 6);
        const auto p = random_distribution(n, rng);
        const auto k = gaussian_profile(n, 1.0);
        std::vector<double> g(n);
        for (double& v : g) {
            v = uniform(rng, 0.5, 4.0);
        }
        const double shannon = core::gem_objective(p, k, g);
        for (double alpha : {1.0 - 1e-3, 1.0 + 1e-3}) {
            worst_limit = std::max(worst_limit, std::abs(core::tsallis_gem_objective(p, k, g, alpha) - shannon));
        }
        for (double alpha : {0.5, 1.5}) {
            worst_condition = std::max(worst_condition, max_condition_error(p, k, ascend_tabular_g(p, k, alpha, 4000)));
        }
    }
    return {worst_limit < 1e-3 && worst_condition < 0.05,
            fmt("max |GEM_a - GEM_1| at a = 1 +- 1e-3: %.2e (< 1e-3), max |g p_k - 1| at a in {0.5, 1.5}: %.2e (< 0.05)",
                worst_limit, worst_condition)};
}

Verdict tabular_msve()
{
    const auto mdp = oracles::TabularMdp::chain(5, 5);
    const auto k = core::indicator_similarity(5);
    const auto best = oracles::max_entropy_policy_search(mdp, k);
    agent::TabularGemConfig cfg;
    cfg.seed = 606;
    const auto trained = agent::train_tabular_gem(mdp, k, cfg);
    return {trained.entropy >= 0.95 * best.entropy,
            fmt("trained H = %.4f, search maximum = %.4f, ratio %.4f (>= 0.95)", trained.entropy, best.entropy,
                trained.entropy / best.entropy)};
}

// ---------------------------------------------------------------------------------------------
// Agent-level criteria.

constexpr std::size_t eval_episodes = 100;

struct Curve {
    std::vector<double> steps;
    std::vector<double> success;
    double final_success = 0.0;
};

Curve train_curve(const agent::TrainerConfig& config, std::size_t steps, std::size_t eval_every,
                  double stop_at = 2.0)
{
    agent::Trainer trainer(config);
    Curve c;
    for (std::size_t i = 1; i <= steps; ++i) {
        trainer.step();
        if (i % eval_every == 0 || i == steps) {
            const auto ev = trainer.evaluate(eval_episodes, i);
            c.steps.push_back(static_cast<double>(i));
            c.success.push_back(ev.success_rate);
            c.final_success = ev.success_rate;
            if (ev.success_rate >= stop_at) {
                break;
            }
        }
    }
    return c;
}

agent::TrainerConfig base_config(const std::string& env, std::uint64_t seed)
{
    auto c = cli::default_config(env).trainer;
    c.seed = seed;
    return c;
}

Verdict two_rooms()
{
    const auto c = base_config("2-rooms", 7);
    const auto curve = train_curve(c, 50000, 100, 0.9);
    return {curve.final_success >= 0.9,
            fmt("success %.2f after %.0f steps (>= 0.9 within 50000)", curve.final_success, curve.steps.back())};
}

Verdict sixteen_leaves()
{
    auto c = base_config("16-leaves", 8);
    // At batch 64 and normalizer scale 0.005 the policy never reaches a leaf within the step budget.
    c.batch_size = 128;
    c.policy_lr = 3e-3;
    c.w_ent = 3e-3;
    c.norm_scale = 0.05;
    c.norm_mean = 0.0;
    const std::size_t steps = 12000;
    const auto gem_curve = train_curve(c, steps, 500);
    c.intrinsic = agent::IntrinsicMode::none;
    const auto plain = train_curve(c, steps, 500);
    return {gem_curve.final_success >= 0.8 && plain.final_success <= 0.2,
            fmt("after %zu steps: GEM success %.2f (>= 0.8), no intrinsic reward %.2f (<= 0.2)", steps,
                gem_curve.final_success, plain.final_success)};
}

std::vector<double> bucket_means(const Curve& c)
{
    std::vector<double> out;
    for (const auto& b : cli::smooth_curve(c.steps, c.success, 20)) {
        out.push_back(b.mean);
    }
    return out;
}

Verdict count_oracle_comparison()
{
    const std::size_t steps = 2000;
    const std::size_t every = 50;
    const double tolerance = 0.1;
    auto c = base_config("2-rooms", 9);
    const auto gem_b = bucket_means(train_curve(c, steps, every));
    c.intrinsic = agent::IntrinsicMode::count_oracle;
    c.oracle_period = 1;
    const auto n1 = bucket_means(train_curve(c, steps, every));
    c.oracle_period = 10;
    const auto n10 = bucket_means(train_curve(c, steps, every));
    bool dominates = true;
    double gem_area = 0.0;
    double n10_area = 0.0;
    for (std::size_t i = 0; i < gem_b.size(); ++i) {
        dominates = dominates && gem_b[i] >= n10[i] - tolerance;
        gem_area += gem_b[i];
        n10_area += n10[i];
    }
    dominates = dominates && gem_area > n10_area;
    const double final_gap = std::abs(gem_b.back() - n1.back());
    return {dominates && final_gap <= tolerance,
            fmt("GEM >= n=10 - %.2f in every bucket and larger area (%.2f vs %.2f): %s; final bucket GEM %.2f vs n=1 %.2f "
                "(|diff| <= %.2f)",
                tolerance, gem_area, n10_area, dominates ? "yes" : "no", gem_b.back(), n1.back(), tolerance)};
}

double uniform_success(const std::string& env, std::size_t episodes)
{
    auto proto = envs::make_environment(env, envs::EncodingMode::feature, 0);
    Rng rng(split_seed(1010, 0));
    Rng init(1);
    const auto nets = agent::PolicyValueNets::create(
        agent::PolicyShape{proto->observation_dim(), proto->action_count(), proto->episode_length(), 4}, {4}, 0.0, init);
    std::size_t hits = 0;
    for (std::size_t e = 0; e < episodes; ++e) {
        auto env_e = proto->fresh(split_seed(1010, e + 1));
        hits += agent::rollout(*env_e, nets, rng, agent::ActionMode::uniform).success() ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(episodes);
}

Verdict noise_ablation()
{
    const std::size_t steps = 2000;
    auto clean = base_config("2-rooms", 10);
    auto noisy = base_config("2-rooms-noisy", 10);
    const double s_clean = train_curve(clean, steps, steps).final_success;
    const double s_noisy = train_curve(noisy, steps, steps).final_success;
    noisy.ar.scale = 0.0;
    const double s_no_ar = train_curve(noisy, steps, steps).final_success;
    const double random = uniform_success("2-rooms-noisy", 10000);
    const bool ok = std::abs(s_clean - s_noisy) < 0.1 && s_no_ar <= random + 0.05;
    return {ok, fmt("after %zu steps: AR noiseless %.2f vs noisy %.2f (|diff| < 0.1); noisy without AR %.2f vs uniform "
                    "random %.3f (<= +0.05)",
                    steps, s_clean, s_noisy, s_no_ar, random)};
}

Verdict resolution_ordering()
{
    auto cfg = cli::default_config("2-rooms");
    cfg.trainer.seed = 11;
    cfg.steps = 1500;
    cfg.eval_every = 0;
    cfg.eval_episodes = 10;
    const auto results = cli::run_sweep_resolution(cfg);
    double coarse = 0.0;
    double medium = 0.0;
    double fine = 0.0;
    for (const auto& r : results) {
        (r.setting.name == "coarse" ? coarse : r.setting.name == "medium" ? medium : fine) = r.outcome.final_entropy;
    }
    return {fine > medium && medium > coarse,
            fmt("final tracked entropies: fine %.4f > medium %.4f > coarse %.4f", fine, medium, coarse)};
}

Verdict bimodal_density()
{
    const auto cfg = cli::default_config();
    const auto reports = oracles::collapse_harness(cfg.bimodal, oracles::CollapseVariant::all(), cfg.density);
    bool ok = true;
    std::ostringstream detail;
    for (const auto& r : reports) {
        if (!r.variant.learned_similarity) {
            ok = ok && r.error < 0.1;
            detail << r.variant.name() << " error " << fmt("%.4f", r.error) << " (< 0.1); ";
        } else if (!r.variant.discrete) {
            ok = ok && r.implied_entropy > r.truth_entropy;
            detail << r.variant.name() << fmt(" implied entropy %.4f > true %.4f", r.implied_entropy, r.truth_entropy);
        }
    }
    return {ok, detail.str()};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> criteria{
        {1, "maximiser recovery", 10.0, maximiser_recovery},
        {2, "discrete recovery", 30.0, discrete_recovery},
        {3, "gradient exactness", 30.0, gradient_exactness},
        {4, "unbiased policy gradient", 120.0, unbiased_policy_gradient},
        {5, "Tsallis consistency", 30.0, tsallis_consistency},
        {6, "tabular MSVE", 120.0, tabular_msve},
        {7, "2-Rooms", 1800.0, two_rooms},
        {8, "16-Leaves exhaustive exploration", 0.0, sixteen_leaves},
        {9, "count-oracle comparison", 0.0, count_oracle_comparison},
        {10, "noise/AR ablation", 0.0, noise_ablation},
        {11, "resolution ordering", 0.0, resolution_ordering},
        {12, "bimodal density", 300.0, bimodal_density},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::stoi(argv[i]));
    }
    int failures = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && !selected.contains(c.id)) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = c.time_limit_s <= 0.0 || secs < c.time_limit_s;
        const bool pass = v.pass && in_time;
        failures += pass ? 0 : 1;
        std::string limit = c.time_limit_s > 0.0 ? fmt(" (limit %.0f s)", c.time_limit_s) : std::string();
        std::printf("[%s] %2d %s: %s; %.1f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs,
                    limit.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
