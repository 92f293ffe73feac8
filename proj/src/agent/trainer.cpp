#include "gem/agent/trainer.hpp"

#include "gem/agent/policy_gradient.hpp"
#include "gem/core/ar_loss.hpp"
#include "gem/core/entropy.hpp"
#include "gem/core/gem_loss.hpp"
#include "gem/ndiff/checkpoint.hpp"

#include <cmath>
#include <fstream>

namespace gem::agent {

namespace {

// Independent random streams under the root seed.
enum Stream : std::uint64_t { init_stream = 1, pool_stream = 2, loss_stream = 3, eval_stream = 1000 };

void add_scaled(ndiff::Gradients& into, const ndiff::Gradients& g, double scale)
{
    if (g.empty()) {
        return;
    }
    if (into.empty()) {
        into = g;
        for (auto& t : into) {
            for (double& v : t.values()) {
                v *= scale;
            }
        }
        return;
    }
    for (std::size_t i = 0; i < into.size(); ++i) {
        for (std::size_t j = 0; j < into[i].size(); ++j) {
            into[i][j] += scale * g[i][j];
        }
    }
}

void check_finite(double v, const char* what)
{
    if (!std::isfinite(v)) {
        throw NumericalAbort(std::string("non-finite ") + what);
    }
}

struct Half {
    core::GemBatch states;  // x_{t+1} of every transition
    Tensor from;            // x_t (f-input), for AR
    std::size_t rows = 0;
};

Half gather(const std::vector<Trace>& traces, std::size_t begin, std::size_t end, std::size_t obs_dim)
{
    Half h;
    for (std::size_t i = begin; i < end; ++i) {
        h.rows += traces[i].steps.size();
    }
    Tensor next = Tensor::matrix(h.rows, obs_dim);
    h.from = Tensor::matrix(h.rows, obs_dim);
    std::size_t r = 0;
    for (std::size_t i = begin; i < end; ++i) {
        for (const auto& tr : traces[i].steps) {
            std::copy(tr.next_obs.begin(), tr.next_obs.end(), next.row(r).begin());
            std::copy(tr.obs.begin(), tr.obs.end(), h.from.row(r).begin());
            ++r;
        }
    }
    h.states = core::GemBatch::same(std::move(next));
    return h;
}

}  // namespace

std::string to_string(IntrinsicMode m)
{
    switch (m) {
    case IntrinsicMode::gem:
        return "gem";
    case IntrinsicMode::none:
        return "none";
    case IntrinsicMode::count_oracle:
        return "count-oracle";
    }
    return "gem";
}

IntrinsicMode intrinsic_from_string(std::string_view s)
{
    if (s == "gem") {
        return IntrinsicMode::gem;
    }
    if (s == "none") {
        return IntrinsicMode::none;
    }
    if (s == "count-oracle") {
        return IntrinsicMode::count_oracle;
    }
    throw std::invalid_argument("unknown intrinsic mode '" + std::string(s) + "'");
}

std::string to_string(EmbeddingMode m)
{
    return m == EmbeddingMode::learned ? "learned" : "identity";
}

EmbeddingMode embedding_from_string(std::string_view s)
{
    if (s == "learned") {
        return EmbeddingMode::learned;
    }
    if (s == "identity") {
        return EmbeddingMode::identity;
    }
    throw std::invalid_argument("unknown embedding mode '" + std::string(s) + "'");
}

TrainerConfig TrainerConfig::for_env(const std::string& env)
{
    TrainerConfig c;
    c.env = env;
    const std::string base = env.ends_with("-noisy") ? env.substr(0, env.size() - 6) : env;
    if (base == "16-leaves") {
        c.trace_length = 14;
        c.trace_period = 7;
    } else if (base == "cartpole-swingup") {
        c.norm_scale = 0.15;
        c.norm_mean = 0.15;
        c.w_ent = 1e-2;
    } else if (base == "mountain-car") {
        c.norm_scale = 0.25;
        c.norm_mean = 0.7;
        c.w_ent = 1e-2;
    }
    return c;
}

void TrainerConfig::validate() const
{
    if (batch_size < 2 || batch_size % 2 != 0) {
        throw std::invalid_argument("batch_size must be an even number >= 2");
    }
    if (trace_length <= 0 || trace_period <= 0) {
        throw std::invalid_argument("trace length and period must be positive");
    }
    if (policy_hidden.empty() || g_hidden.empty()) {
        throw std::invalid_argument("policy and g networks need at least one hidden layer");
    }
    if (embedding == EmbeddingMode::learned && f_widths.empty()) {
        throw std::invalid_argument("a learned embedding needs f widths");
    }
    if (!(policy_lr > 0.0) || !(gem_lr > 0.0) || beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw std::invalid_argument("invalid optimiser settings");
    }
    if (!(norm_decay > 0.0 && norm_decay < 1.0) || !(tracker_decay > 0.0 && tracker_decay < 1.0)) {
        throw std::invalid_argument("decays must lie in (0, 1)");
    }
    if (oracle_period == 0) {
        throw std::invalid_argument("oracle period must be positive");
    }
    if (gamma != 1.0) {
        throw std::invalid_argument("only undiscounted episodes (gamma = 1) are supported");
    }
    ar.validate();
    core::check_tsallis_order(gem.alpha);
}

Trainer::Trainer(TrainerConfig config) : config_(std::move(config)), rng_(split_seed(config_.seed, loss_stream))
{
    config_.validate();
    prototype_ = envs::make_environment(config_.env, config_.encoding, split_seed(config_.seed, eval_stream),
                                        config_.episode_length);
    if (config_.intrinsic == IntrinsicMode::count_oracle && !prototype_->discrete()) {
        throw envs::NotDiscrete("the count oracle needs a discrete environment");
    }
    pool_ = std::make_unique<ActorPool>(*prototype_, config_.batch_size, config_.trace_length, config_.trace_period,
                                        split_seed(config_.seed, pool_stream));

    Rng init(split_seed(config_.seed, init_stream));
    const std::size_t obs_dim = prototype_->observation_dim();
    PolicyShape shape{obs_dim, prototype_->action_count(), prototype_->episode_length(), config_.time_buckets};
    nets_ = PolicyValueNets::create(shape, config_.policy_hidden, config_.w_ent, init);
    const std::vector<std::size_t> f_widths =
        config_.embedding == EmbeddingMode::learned ? config_.f_widths : std::vector<std::size_t>{};
    model_ = core::GemModel::create(obs_dim, config_.g_hidden, obs_dim, f_widths, config_.gem, init);

    const ndiff::AdamConfig gem_adam{config_.gem_lr, config_.beta1, config_.beta2, 1e-8};
    const ndiff::AdamConfig pol_adam{config_.policy_lr, config_.beta1, config_.beta2, 1e-8};
    g_opt_ = ndiff::AdamState::for_network(model_.g_net(), gem_adam);
    if (model_.learned_embedding()) {
        f_opt_ = ndiff::AdamState::for_network(model_.f_net(), gem_adam);
    }
    pi_opt_ = ndiff::AdamState::for_network(nets_.pi_net(), pol_adam);
    v_opt_ = ndiff::AdamState::for_network(nets_.v_net(), pol_adam);

    normalizer_.decay = config_.norm_decay;
    normalizer_.target_scale = config_.norm_scale;
    normalizer_.target_mean = config_.norm_mean;

    if (prototype_->discrete()) {
        state_tracker_.emplace(prototype_->state_count(), config_.tracker_decay);
        cell_tracker_.emplace(prototype_->cell_count(), config_.tracker_decay);
        if (config_.intrinsic == IntrinsicMode::count_oracle) {
            oracle_.emplace(prototype_->state_count(), config_.oracle_decay, config_.oracle_period);
        }
    }
}

StepMetrics Trainer::step()
{
    Collection batch = pool_->collect(nets_);
    auto& traces = batch.traces;
    const std::size_t half = traces.size() / 2;
    const std::size_t obs_dim = prototype_->observation_dim();

    StepMetrics m;
    std::vector<double> raw;  // intrinsic reward per transition, traces concatenated

    if (config_.intrinsic == IntrinsicMode::gem) {
        const Half h1 = gather(traces, 0, half, obs_dim);
        const Half h2 = gather(traces, half, traces.size(), obs_dim);
        const auto l1 = core::gem_loss_minibatch(model_, h1.states, h2.states, rng_);
        const auto l2 = core::gem_loss_minibatch(model_, h2.states, h1.states, rng_);
        raw = l1.rewards;
        raw.insert(raw.end(), l2.rewards.begin(), l2.rewards.end());
        m.gem_objective = 0.5 * (l1.objective + l2.objective);
        m.gem_loss = 0.5 * (l1.loss + l2.loss);
        check_finite(m.gem_objective, "GEM objective");

        ndiff::Gradients g_grad;
        add_scaled(g_grad, l1.g_grads, 0.5);
        add_scaled(g_grad, l2.g_grads, 0.5);
        ndiff::adam_step(g_opt_, model_.g_net(), g_grad);

        if (model_.learned_embedding()) {
            ndiff::Gradients f_grad;
            add_scaled(f_grad, l1.f_grads, 0.5);
            add_scaled(f_grad, l2.f_grads, 0.5);
            if (config_.ar.scale > 0.0) {
                const auto a1 = core::ar_loss(model_, h1.from, h1.states.f_input, config_.ar);
                const auto a2 = core::ar_loss(model_, h2.from, h2.states.f_input, config_.ar);
                m.ar_loss = 0.5 * (a1.value + a2.value);
                check_finite(m.ar_loss, "AR loss");
                add_scaled(f_grad, a1.f_grads, 0.5 * config_.ar.scale);
                add_scaled(f_grad, a2.f_grads, 0.5 * config_.ar.scale);
            }
            ndiff::adam_step(f_opt_, model_.f_net(), f_grad);
        }
    } else if (config_.intrinsic == IntrinsicMode::count_oracle) {
        oracle_->record(batch.state_visits);
        for (const auto& tr : traces) {
            for (const auto& s : tr.steps) {
                raw.push_back(oracle_->reward(s.next_state));
            }
        }
    }

    std::vector<double> normalized;
    if (!raw.empty()) {
        double mean = 0.0;
        for (double r : raw) {
            mean += r;
        }
        mean /= static_cast<double>(raw.size());
        double var = 0.0;
        for (double r : raw) {
            var += (r - mean) * (r - mean);
        }
        m.intrinsic_mean = mean;
        m.intrinsic_std = std::sqrt(var / static_cast<double>(raw.size()));
        normalized = core::normalize_reward(normalizer_, raw);
    }

    std::vector<std::vector<double>> totals(traces.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        totals[i].resize(traces[i].steps.size());
        for (std::size_t t = 0; t < traces[i].steps.size(); ++t) {
            double r = config_.use_extrinsic ? traces[i].steps[t].reward : 0.0;
            if (!normalized.empty()) {
                r += normalized[k];
            }
            totals[i][t] = r;
            ++k;
        }
    }

    const bool update = config_.intrinsic != IntrinsicMode::count_oracle || oracle_->policy_update_due();
    const auto pg = policy_gradient_loss(traces, totals, nets_, update);
    check_finite(pg.total, "policy-gradient loss");
    m.policy_loss = pg.ploss;
    m.value_loss = pg.vloss;
    m.action_entropy = pg.entropy;
    if (update) {
        ndiff::adam_step(pi_opt_, nets_.pi_net(), pg.pi_grads);
        ndiff::adam_step(v_opt_, nets_.v_net(), pg.v_grads);
        m.policy_updated = true;
    }

    if (state_tracker_) {
        state_tracker_->record(batch.state_visits);
        cell_tracker_->record(batch.cell_visits);
        m.visitation_entropy = state_tracker_->entropy();
    }
    m.finished_episodes = batch.finished_returns.size();
    if (!batch.finished_returns.empty()) {
        std::size_t wins = 0;
        for (double r : batch.finished_returns) {
            wins += r > 0.0 ? 1 : 0;
        }
        m.finished_success = static_cast<double>(wins) / static_cast<double>(batch.finished_returns.size());
    }
    ++steps_;
    m.step = steps_;
    m.frames = pool_->frames();
    return m;
}

EvalResult Trainer::evaluate(std::size_t episodes, std::uint64_t stream) const
{
    auto env = prototype_->fresh(split_seed(split_seed(config_.seed, eval_stream + 1), 2 * stream));
    Rng rng(split_seed(split_seed(config_.seed, eval_stream + 1), 2 * stream + 1));
    EvalResult out;
    out.episodes = episodes;
    std::size_t wins = 0;
    for (std::size_t e = 0; e < episodes; ++e) {
        const Episode ep = rollout(*env, nets_, rng, ActionMode::sample);
        out.mean_return += ep.extrinsic_return;
        wins += ep.success() ? 1 : 0;
    }
    if (episodes > 0) {
        out.mean_return /= static_cast<double>(episodes);
        out.success_rate = static_cast<double>(wins) / static_cast<double>(episodes);
    }
    return out;
}

void Trainer::save(const std::filesystem::path& dir, const std::string& config_hash,
                   const std::string& preamble) const
{
    std::filesystem::create_directories(dir);
    ndiff::save_checkpoint(dir / "g.ckpt", model_.g_net());
    if (model_.learned_embedding()) {
        ndiff::save_checkpoint(dir / "f.ckpt", model_.f_net());
    }
    ndiff::save_checkpoint(dir / "pi.ckpt", nets_.pi_net());
    ndiff::save_checkpoint(dir / "v.ckpt", nets_.v_net());
    const auto tmp = dir / "manifest.txt.tmp";
    {
        std::ofstream out(tmp);
        out << preamble << "step=" << steps_ << "\n"
            << "frames=" << pool_->frames() << "\n"
            << "seed=" << config_.seed << "\n"
            << "config_hash=" << config_hash << "\n"
            << "networks=g" << (model_.learned_embedding() ? ",f" : "") << ",pi,v\n";
        if (!out) {
            throw std::runtime_error("failed to write checkpoint manifest");
        }
    }
    std::filesystem::rename(tmp, dir / "manifest.txt");
}

void Trainer::load_networks(const std::filesystem::path& dir)
{
    auto replace = [&](ndiff::Mlp& net, const char* file) {
        ndiff::Mlp loaded = ndiff::load_checkpoint(dir / file);
        if (loaded.input_dim() != net.input_dim() || loaded.output_dim() != net.output_dim()
            || loaded.layers().size() != net.layers().size()) {
            throw std::runtime_error(std::string(file) + " does not match the configured network");
        }
        net = std::move(loaded);
    };
    replace(model_.g_net(), "g.ckpt");
    if (model_.learned_embedding()) {
        replace(model_.f_net(), "f.ckpt");
    }
    replace(nets_.pi_net(), "pi.ckpt");
    replace(nets_.v_net(), "v.ckpt");
}

}  // namespace gem::agent
