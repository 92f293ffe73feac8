#include "gem/oracles/collapse.hpp"

#include "gem/core/gem_loss.hpp"
#include "gem/core/soft1hot.hpp"
#include "gem/ndiff/adam.hpp"

#include <cmath>

namespace gem::oracles {

using ndiff::Tensor;

namespace {

struct Encoder {
    const BimodalSpec& spec;
    std::size_t n_bucket;
    bool learned;

    core::GemBatch encode(std::span<const double> xs) const
    {
        core::GemBatch b;
        b.g_input = Tensor::matrix(xs.size(), n_bucket);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            core::soft1hot_into(xs[i], spec.support_lo(), spec.support_hi(), b.g_input.row(i));
        }
        if (learned) {
            b.f_input = b.g_input;
        } else {
            b.f_input = Tensor::matrix(xs.size(), 1, std::vector<double>(xs.begin(), xs.end()));
        }
        return b;
    }
};

std::vector<double> normalise(std::vector<double> v, std::span<const double> weights)
{
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        total += weights[i] * v[i];
    }
    for (double& x : v) {
        x /= total;
    }
    return v;
}

double weighted_l1(std::span<const double> a, std::span<const double> b, std::span<const double> w)
{
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        total += w[i] * std::abs(a[i] - b[i]);
    }
    return total;
}

double weighted_entropy(std::span<const double> q, std::span<const double> w)
{
    double h = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (q[i] > 0.0) {
            h -= w[i] * q[i] * std::log(q[i]);
        }
    }
    return h;
}

}  // namespace

std::string CollapseVariant::name() const
{
    return std::string(discrete ? "discrete" : "continuous") + (learned_similarity ? "-learned-k" : "-fixed-k");
}

std::vector<CollapseVariant> CollapseVariant::all()
{
    return {{true, false}, {true, true}, {false, false}, {false, true}};
}

CollapseReport run_collapse_variant(const BimodalSpec& spec, const CollapseVariant& variant,
                                    const CollapseSettings& settings)
{
    Rng rng(split_seed(settings.seed, (variant.discrete ? 2 : 0) + (variant.learned_similarity ? 1 : 0)));
    core::GemHyper hyper;
    hyper.c = variant.learned_similarity ? settings.c_learned : settings.c_fixed;
    hyper.n_neg = settings.n_neg;
    hyper.w_reg = settings.w_reg;
    std::vector<std::size_t> f_widths;
    if (variant.learned_similarity) {
        f_widths = {settings.hidden, settings.hidden, settings.embed_dim};
    }
    core::GemModel model = core::GemModel::create(settings.n_bucket, {settings.hidden, settings.hidden},
                                                  settings.n_bucket, f_widths, hyper, rng);
    const ndiff::AdamConfig adam{settings.learning_rate, settings.beta1, settings.beta2, 1e-8};
    ndiff::AdamState g_opt = ndiff::AdamState::for_network(model.g_net(), adam);
    ndiff::AdamState f_opt;
    if (model.learned_embedding()) {
        f_opt = ndiff::AdamState::for_network(model.f_net(), adam);
    }

    const Encoder enc{spec, settings.n_bucket, variant.learned_similarity};
    const auto points = bimodal_points(spec);
    const auto discrete = bimodal_discretized(spec);
    std::vector<double> cdf(discrete.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += discrete[i];
        cdf[i] = acc;
    }
    auto draw = [&](std::size_t n) {
        std::vector<double> xs(n);
        for (double& x : xs) {
            if (variant.discrete) {
                const double u = uniform01(rng);
                std::size_t i = 0;
                while (i + 1 < cdf.size() && u >= cdf[i]) {
                    ++i;
                }
                x = points[i];
            } else {
                x = bimodal_sample(spec, rng);
            }
        }
        return xs;
    };

    for (std::size_t step = 0; step < settings.steps; ++step) {
        const auto b1 = enc.encode(draw(settings.batch_size));
        const auto b2 = enc.encode(draw(settings.batch_size));
        const auto res = core::gem_loss_minibatch(model, b1, b2, rng);
        ndiff::adam_step(g_opt, model.g_net(), res.g_grads);
        if (model.learned_embedding()) {
            ndiff::adam_step(f_opt, model.f_net(), res.f_grads);
        }
    }

    CollapseReport rep;
    rep.variant = variant;
    rep.steps = settings.steps;
    rep.untrained = settings.steps == 0;
    std::vector<double> weights;
    if (variant.discrete) {
        rep.x = points;
        rep.truth = discrete.probs();
        weights.assign(points.size(), 1.0);
    } else {
        const double lo = spec.support_lo();
        const double hi = spec.support_hi();
        weights = simpson_weights(lo, hi, settings.quadrature_nodes);
        rep.x.resize(settings.quadrature_nodes);
        rep.truth.resize(settings.quadrature_nodes);
        for (std::size_t i = 0; i < rep.x.size(); ++i) {
            rep.x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(rep.x.size() - 1);
            rep.truth[i] = bimodal_density(spec, rep.x[i]);
        }
    }
    const auto g = model.g(enc.encode(rep.x).g_input);
    std::vector<double> inv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        inv[i] = 1.0 / g[i];
    }
    rep.implied = normalise(std::move(inv), weights);

    if (variant.learned_similarity) {
        rep.reference = rep.truth;
    } else {
        // p_k(x) = E_{x'}[exp(-c |x - x'|)] under the truth.
        std::vector<double> pk(rep.x.size(), 0.0);
        for (std::size_t i = 0; i < rep.x.size(); ++i) {
            for (std::size_t j = 0; j < rep.x.size(); ++j) {
                pk[i] += weights[j] * rep.truth[j] * std::exp(-settings.c_fixed * std::abs(rep.x[i] - rep.x[j]));
            }
        }
        rep.reference = normalise(std::move(pk), weights);
    }
    const double scale = variant.discrete ? 0.5 : 1.0;
    rep.error = scale * weighted_l1(rep.implied, rep.reference, weights);
    rep.error_vs_truth = scale * weighted_l1(rep.implied, rep.truth, weights);
    rep.truth_entropy = weighted_entropy(rep.truth, weights);
    rep.implied_entropy = weighted_entropy(rep.implied, weights);
    return rep;
}

std::vector<CollapseReport> collapse_harness(const BimodalSpec& spec, const std::vector<CollapseVariant>& variants,
                                             const CollapseSettings& settings)
{
    std::vector<CollapseReport> out;
    out.reserve(variants.size());
    for (const auto& v : variants) {
        out.push_back(run_collapse_variant(spec, v, settings));
    }
    return out;
}

}  // namespace gem::oracles
