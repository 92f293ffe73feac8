#pragma once

#include "gem/core/model.hpp"
#include "gem/ndiff/mlp.hpp"

#include <span>
#include <vector>

namespace gem::core {

struct GemLossResult {
    /// Per-anchor R = c0 + ln g(x_i) - mean_m[(g(x_i) + g(x'_m)) k(x_i, x'_m)] (c0 = 1 when alpha = 1).
    std::vector<double> rewards;
    /// mean_i[1 + ln g_i - g_i mean_m k_im]: the sampled GEM objective (to be maximised).
    double objective = 0.0;
    /// mean_i ||f(x_i)||^2.
    double regularizer = 0.0;
    /// objective + w_reg * regularizer, the per-batch LOSS as tabulated in training logs.
    double loss = 0.0;
    /// Quantity the optimiser descends: -objective + w_reg * regularizer.
    double minimized = 0.0;
    ndiff::Gradients g_grads;  // d minimized / d g parameters
    ndiff::Gradients f_grads;  // d minimized / d f parameters (empty for identity f)
};

/// `n_neg` indices per anchor, uniform with replacement over [0, pool), row-major per anchor.
std::vector<std::size_t> sample_negatives(std::size_t anchors, std::size_t pool, std::size_t n_neg, Rng& rng);

/// Anchors are the rows of b1; negatives index rows of b2 (anchors.size() * n_neg entries).
/// Gradients flow into f through both anchor and negative embeddings.
GemLossResult gem_loss_minibatch(const GemModel& model, const GemBatch& b1, const GemBatch& b2,
                                 std::span<const std::size_t> negatives, bool with_gradients = true);

/// Draws model.hyper().n_neg negatives per anchor from b2 with `rng`.
GemLossResult gem_loss_minibatch(const GemModel& model, const GemBatch& b1, const GemBatch& b2, Rng& rng,
                                 bool with_gradients = true);

}  // namespace gem::core
