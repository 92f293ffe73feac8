#include "gem/core/normalizer.hpp"

#include <algorithm>
#include <cmath>

namespace gem::core {

double RewardNormalizer::sigma() const
{
    return std::max(std::sqrt(variance), sigma_floor);
}

void RewardNormalizer::update(std::span<const double> batch)
{
    if (batch.empty()) {
        return;
    }
    const double n = static_cast<double>(batch.size());
    double batch_mean = 0.0;
    for (double r : batch) {
        batch_mean += r;
    }
    batch_mean /= n;
    double batch_var = 0.0;
    for (double r : batch) {
        batch_var += (r - batch_mean) * (r - batch_mean);
    }
    batch_var /= n;
    if (!initialized) {
        mean = batch_mean;
        variance = batch_var;
        initialized = true;
        return;
    }
    mean = decay * mean + (1.0 - decay) * batch_mean;
    variance = decay * variance + (1.0 - decay) * batch_var;
}

std::vector<double> RewardNormalizer::apply(std::span<const double> batch) const
{
    const double s = sigma();
    std::vector<double> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        out[i] = target_scale * (batch[i] - mean) / s + target_mean;
    }
    return out;
}

std::vector<double> normalize_reward(RewardNormalizer& normalizer, std::span<const double> batch)
{
    normalizer.update(batch);
    return normalizer.apply(batch);
}

}  // namespace gem::core
