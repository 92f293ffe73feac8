#pragma once

#include "gem/agent/count_oracle.hpp"
#include "gem/agent/policy.hpp"
#include "gem/agent/rollout.hpp"
#include "gem/core/model.hpp"
#include "gem/core/normalizer.hpp"
#include "gem/envs/environment.hpp"
#include "gem/ndiff/adam.hpp"
#include "gem/oracles/tracker.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gem::agent {

enum class IntrinsicMode { gem, none, count_oracle };
enum class EmbeddingMode { learned, identity };

std::string to_string(IntrinsicMode m);
IntrinsicMode intrinsic_from_string(std::string_view s);
std::string to_string(EmbeddingMode m);
EmbeddingMode embedding_from_string(std::string_view s);

struct TrainerConfig {
    std::string env = "2-rooms";
    envs::EncodingMode encoding = envs::EncodingMode::feature;
    int episode_length = 0;  // 0 keeps the environment default

    std::size_t batch_size = 64;  // traces per step, split into halves B1 and B2
    int trace_length = 20;
    int trace_period = 10;

    std::vector<std::size_t> policy_hidden{64, 64};
    std::size_t time_buckets = 16;
    std::vector<std::size_t> g_hidden{64, 64};
    std::vector<std::size_t> f_widths{64, 64, 16};
    EmbeddingMode embedding = EmbeddingMode::learned;

    core::GemHyper gem{};
    core::ArConfig ar{4.0, 1.0, 1.0};

    double norm_scale = 0.005;
    double norm_mean = 0.005;
    double norm_decay = 0.99;

    double w_ent = 1e-3;
    double gamma = 1.0;  // undiscounted within episodes; recorded only
    double policy_lr = 1e-3;
    double gem_lr = 1e-3;
    double beta1 = 0.0;
    double beta2 = 0.95;

    bool use_extrinsic = true;
    IntrinsicMode intrinsic = IntrinsicMode::gem;
    std::size_t oracle_period = 1;
    double oracle_decay = 0.99;
    double tracker_decay = 0.99;

    std::uint64_t seed = 0;

    /// Trace and intrinsic-scale defaults for the named environment.
    static TrainerConfig for_env(const std::string& env);
    void validate() const;
};

struct StepMetrics {
    std::uint64_t step = 0;
    std::uint64_t frames = 0;
    double gem_objective = 0.0;
    double gem_loss = 0.0;
    double ar_loss = 0.0;
    double intrinsic_mean = 0.0;
    double intrinsic_std = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double action_entropy = 0.0;
    double visitation_entropy = 0.0;
    std::size_t finished_episodes = 0;
    double finished_success = 0.0;  // fraction of episodes finished this step with return > 0
    bool policy_updated = false;
};

struct EvalResult {
    double success_rate = 0.0;
    double mean_return = 0.0;
    std::size_t episodes = 0;
};

class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Single-process GEM learner: actor pool, GEM model, policy/value nets, reward normaliser and
/// optimiser states. A run is a pure function of (config, seed).
class Trainer {
public:
    explicit Trainer(TrainerConfig config);

    /// One training step on a fresh batch of traces.
    StepMetrics step();

    /// Sampled-policy evaluation on an environment stream derived from (seed, stream).
    EvalResult evaluate(std::size_t episodes, std::uint64_t stream) const;

    const TrainerConfig& config() const noexcept { return config_; }
    const core::GemModel& model() const noexcept { return model_; }
    const PolicyValueNets& nets() const noexcept { return nets_; }
    const core::RewardNormalizer& normalizer() const noexcept { return normalizer_; }
    const oracles::VisitationTracker* state_tracker() const noexcept { return state_tracker_ ? &*state_tracker_ : nullptr; }
    const oracles::VisitationTracker* cell_tracker() const noexcept { return cell_tracker_ ? &*cell_tracker_ : nullptr; }
    const envs::Environment& environment() const noexcept { return *prototype_; }
    std::uint64_t steps() const noexcept { return steps_; }
    std::uint64_t frames() const noexcept { return pool_->frames(); }

    /// Writes g/f/pi/v checkpoints plus a manifest (step count, seed, config hash). `preamble`
    /// is copied verbatim to the top of the manifest.
    void save(const std::filesystem::path& dir, const std::string& config_hash,
              const std::string& preamble = {}) const;
    /// Loads network weights written by save() into this trainer.
    void load_networks(const std::filesystem::path& dir);

private:
    TrainerConfig config_;
    std::unique_ptr<envs::Environment> prototype_;
    std::unique_ptr<ActorPool> pool_;
    core::GemModel model_;
    PolicyValueNets nets_;
    core::RewardNormalizer normalizer_;
    ndiff::AdamState g_opt_;
    ndiff::AdamState f_opt_;
    ndiff::AdamState pi_opt_;
    ndiff::AdamState v_opt_;
    std::optional<CountOracle> oracle_;
    std::optional<oracles::VisitationTracker> state_tracker_;
    std::optional<oracles::VisitationTracker> cell_tracker_;
    Rng rng_;
    std::uint64_t steps_ = 0;
};

}  // namespace gem::agent
