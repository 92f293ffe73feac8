#pragma once

#include "gem/agent/trainer.hpp"
#include "gem/oracles/bimodal.hpp"
#include "gem/oracles/collapse.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gem::cli {

inline constexpr std::string_view tool_version = "0.1.0";

/// Malformed or inconsistent experiment configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    agent::TrainerConfig trainer;

    std::size_t steps = 1000;          // training steps (one batch of traces each)
    std::size_t eval_every = 100;      // 0 evaluates only at the end
    std::size_t eval_episodes = 100;
    std::size_t checkpoint_every = 0;  // the final checkpoint is always written
    std::size_t heatmap_every = 0;     // the final heatmap is always written for grid worlds
    std::size_t embedding_every = 0;   // the final embeddings are written when f is learned

    oracles::BimodalSpec bimodal;
    oracles::CollapseSettings density;
    std::vector<std::string> density_variants;  // empty selects all four
};

/// Parses INI text. Keys missing from the text keep the defaults of the configured environment;
/// unknown sections or keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Defaults for an environment without any overrides.
ExperimentConfig default_config(const std::string& env = "2-rooms");

/// Canonical INI rendering: every key, fixed order, round-trips through parse_config.
std::string to_ini(const ExperimentConfig& config);
/// FNV-1a 64-bit hash of the canonical rendering, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Validates the trainer part and the run counters; throws ConfigError.
void validate(const ExperimentConfig& config);

std::vector<std::string> split_list(std::string_view text);

}  // namespace gem::cli
