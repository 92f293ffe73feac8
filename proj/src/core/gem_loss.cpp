#include "gem/core/gem_loss.hpp"

#include <cmath>
#include <stdexcept>

namespace gem::core {

std::vector<std::size_t> sample_negatives(std::size_t anchors, std::size_t pool, std::size_t n_neg, Rng& rng)
{
    if (pool == 0) {
        throw std::invalid_argument("negative pool is empty");
    }
    std::vector<std::size_t> out(anchors * n_neg);
    for (auto& v : out) {
        v = static_cast<std::size_t>(uniform_index(rng, pool));
    }
    return out;
}

GemLossResult gem_loss_minibatch(const GemModel& model, const GemBatch& b1, const GemBatch& b2,
                                 std::span<const std::size_t> negatives, bool with_gradients)
{
    const std::size_t n = b1.size();
    const std::size_t pool = b2.size();
    if (n == 0 || pool == 0) {
        throw std::invalid_argument("GEM loss needs non-empty minibatches");
    }
    if (b1.f_input.rows() != n || b2.f_input.rows() != pool) {
        throw ndiff::ShapeError("g-input and f-input row counts differ");
    }
    if (negatives.empty() || negatives.size() % n != 0) {
        throw ndiff::ShapeError("negative index count is not a multiple of the anchor count");
    }
    const std::size_t m = negatives.size() / n;
    const GemHyper& hp = model.hyper();
    const double alpha = hp.alpha;
    const bool shannon = alpha == 1.0;
    const double inv = shannon ? 0.0 : 1.0 / (alpha - 1.0);

    ndiff::MlpTape g_tape;
    const Tensor g_out = with_gradients ? model.g_net().forward(b1.g_input, g_tape) : model.g_net().forward(b1.g_input);
    const std::vector<double> g2 = model.g(b2.g_input);

    const bool learned = model.learned_embedding();
    ndiff::MlpTape f1_tape;
    ndiff::MlpTape f2_tape;
    Tensor f1;
    Tensor f2;
    if (learned && with_gradients) {
        f1 = model.f_net().forward(b1.f_input, f1_tape);
        f2 = model.f_net().forward(b2.f_input, f2_tape);
    } else {
        f1 = model.embed(b1.f_input);
        f2 = model.embed(b2.f_input);
    }
    const std::size_t d = f1.cols();

    GemLossResult out;
    out.rewards.resize(n);
    Tensor dg = Tensor::matrix(n, 1);
    Tensor df1 = Tensor::matrix(n, d);
    Tensor df2 = Tensor::matrix(pool, d);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double inv_m = 1.0 / static_cast<double>(m);
    std::vector<double> k(m);
    std::vector<double> dist(m);

    for (std::size_t i = 0; i < n; ++i) {
        const double gi = g_out(i, 0) + g_floor;
        double k_mean = 0.0;
        double reward_neg = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t idx = negatives[i * m + j];
            if (idx >= pool) {
                throw std::out_of_range("negative index outside the second minibatch");
            }
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = f1(i, c) - f2(idx, c);
                sq += diff * diff;
            }
            dist[j] = std::sqrt(sq);
            k[j] = std::exp(-hp.c * dist[j]);
            k_mean += k[j];
            if (shannon) {
                reward_neg += (gi + g2[idx]) * k[j];
            } else {
                reward_neg += (std::pow(gi, 2.0 - alpha) + std::pow(g2[idx], 2.0 - alpha)) * k[j];
            }
        }
        k_mean *= inv_m;
        reward_neg *= inv_m;

        double norm_sq = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            norm_sq += f1(i, c) * f1(i, c);
        }

        double obj_i;
        double dobj_dg;
        double weight;  // -d obj_i / d k_ij * m
        if (shannon) {
            obj_i = 1.0 + std::log(gi) - gi * k_mean;
            out.rewards[i] = 1.0 + std::log(gi) - reward_neg;
            dobj_dg = 1.0 / gi - k_mean;
            weight = gi;
        } else {
            const double g1a = std::pow(gi, 1.0 - alpha);
            const double g2a = std::pow(gi, 2.0 - alpha);
            obj_i = inv + (1.0 - inv) * g1a - g2a * k_mean;
            out.rewards[i] = inv + (1.0 - inv) * g1a - reward_neg;
            dobj_dg = (2.0 - alpha) * (std::pow(gi, -alpha) - g1a * k_mean);
            weight = g2a;
        }
        out.objective += obj_i;
        out.regularizer += norm_sq;

        if (!with_gradients) {
            continue;
        }
        dg(i, 0) = -inv_n * dobj_dg;
        for (std::size_t j = 0; j < m; ++j) {
            if (dist[j] == 0.0) {
                continue;
            }
            const std::size_t idx = negatives[i * m + j];
            const double coeff = -weight * inv_n * inv_m * hp.c * k[j] / dist[j];
            for (std::size_t c = 0; c < d; ++c) {
                const double u = coeff * (f1(i, c) - f2(idx, c));
                df1(i, c) += u;
                df2(idx, c) -= u;
            }
        }
        for (std::size_t c = 0; c < d; ++c) {
            df1(i, c) += 2.0 * hp.w_reg * inv_n * f1(i, c);
        }
    }
    out.objective *= inv_n;
    out.regularizer *= inv_n;
    out.loss = out.objective + hp.w_reg * out.regularizer;
    out.minimized = -out.objective + hp.w_reg * out.regularizer;

    if (with_gradients) {
        out.g_grads = model.g_net().zero_gradients();
        model.g_net().backward(g_tape, dg, out.g_grads);
        if (learned) {
            out.f_grads = model.f_net().zero_gradients();
            model.f_net().backward(f1_tape, df1, out.f_grads);
            model.f_net().backward(f2_tape, df2, out.f_grads);
        }
    }
    return out;
}

GemLossResult gem_loss_minibatch(const GemModel& model, const GemBatch& b1, const GemBatch& b2, Rng& rng,
                                 bool with_gradients)
{
    const auto negatives = sample_negatives(b1.size(), b2.size(), model.hyper().n_neg, rng);
    return gem_loss_minibatch(model, b1, b2, negatives, with_gradients);
}

}  // namespace gem::core
