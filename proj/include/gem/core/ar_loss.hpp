#pragma once

#include "gem/core/model.hpp"

namespace gem::core {

struct ArResult {
    double value = 0.0;
    ndiff::Gradients f_grads;  // empty when the embedding is not learned
};

/// mean_t (delta^q + ||f(x_t) - f(x_{t+1})||^q)^(1/q) over paired rows of `from` and `to`
/// (f-inputs). Minimising this pulls consecutive embeddings together.
ArResult ar_loss(const GemModel& model, const Tensor& from, const Tensor& to, const ArConfig& cfg,
                 bool with_gradients = true);

/// Same quantity on precomputed embeddings. Throws on an empty input.
double ar_loss_value(const Tensor& f_from, const Tensor& f_to, double q, double delta);

}  // namespace gem::core
