#pragma once

#include <span>
#include <vector>

namespace gem::core {

/// Running standardisation of intrinsic rewards followed by a scale and shift:
/// r' = s * (r - mu) / max(sigma, floor) + m.
/// mu and sigma^2 are exponential moving averages of batch mean and batch variance. Before
/// the first batch mu = 0 and sigma = 1; the first batch sets them directly.
struct RewardNormalizer {
    double decay = 0.99;
    double target_scale = 1.0;  // s
    double target_mean = 0.0;   // m
    double sigma_floor = 1e-6;

    double mean = 0.0;
    double variance = 1.0;
    bool initialized = false;

    double sigma() const;
    /// One EMA update from a batch (no-op for an empty batch).
    void update(std::span<const double> batch);
    std::vector<double> apply(std::span<const double> batch) const;
};

/// update() then apply() on the same batch.
std::vector<double> normalize_reward(RewardNormalizer& normalizer, std::span<const double> batch);

}  // namespace gem::core
