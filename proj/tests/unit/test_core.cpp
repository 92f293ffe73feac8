#include "gem/core/ar_loss.hpp"
#include "gem/core/entropy.hpp"
#include "gem/core/gem_loss.hpp"
#include "gem/core/model.hpp"
#include "gem/core/normalizer.hpp"
#include "gem/core/objective.hpp"
#include "gem/core/soft1hot.hpp"
#include "gem/ndiff/finite_diff.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

using namespace gem;
using namespace gem::core;
using ndiff::Activation;
using ndiff::Layer;

namespace {

DiscreteDistribution random_distribution(std::size_t n, Rng& rng)
{
    std::vector<double> w(n);
    for (double& v : w) {
        v = 0.05 + uniform01(rng);
    }
    return DiscreteDistribution::from_weights(w);
}

// Random symmetric similarity matrix with unit diagonal and entries in (0, 1).
Tensor random_similarity(std::size_t n, Rng& rng)
{
    Tensor k = Tensor::matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            k(i, j) = k(j, i) = uniform(rng, 0.0, 0.9);
        }
    }
    return k;
}

// g network with zero weights whose output is exactly `value` (after the g_floor offset).
Mlp constant_g(std::size_t in_dim, double value)
{
    const double z = std::log(std::expm1(value - g_floor));
    return Mlp({Layer{Tensor::matrix(1, in_dim), Tensor::vector({z}), Activation::softplus}});
}

Tensor random_inputs(std::size_t rows, std::size_t cols, Rng& rng)
{
    Tensor t = Tensor::matrix(rows, cols);
    for (double& v : t.values()) {
        v = uniform(rng, -1.0, 1.0);
    }
    return t;
}

void jitter(Mlp& net, Rng& rng)
{
    for (Tensor* p : net.parameters()) {
        for (double& v : p->values()) {
            v += uniform(rng, -0.1, 0.1);
        }
    }
}

}  // namespace

TEST_SUITE("soft1hot")
{
    TEST_CASE("a value at a bucket centre activates that bucket fully")
    {
        const auto e = soft1hot(0.5, 10, 0.0, 10.0);
        CHECK(e[0] == 1.0);
        CHECK(e[1] == doctest::Approx(std::exp(-1.0)));
        const auto far = soft1hot(-1e6, 10, 0.0, 10.0);
        for (double v : far) {
            CHECK(v == 0.0);
        }
    }

    TEST_CASE("midpoint of the range peaks symmetrically on the two central buckets")
    {
        const auto e = soft1hot(15.0, 30, 0.0, 30.0);
        REQUIRE(e.size() == 30);
        CHECK(e[14] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
        CHECK(e[15] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
        for (std::size_t j = 0; j < 15; ++j) {
            CHECK(e[14 - j] == doctest::Approx(e[15 + j]).epsilon(1e-15));
        }
        CHECK(std::max_element(e.begin(), e.end()) - e.begin() == 14);
    }

    TEST_CASE("components follow the bucket-unit formula")
    {
        Rng rng(4);
        for (int trial = 0; trial < 20; ++trial) {
            const double lo = uniform(rng, -5.0, 0.0);
            const double hi = lo + uniform(rng, 0.5, 10.0);
            const double x = uniform(rng, lo - 1.0, hi + 1.0);
            const std::size_t n = 1 + uniform_index(rng, 40);
            const auto e = soft1hot(x, n, lo, hi);
            const double y = (x - lo) / (hi - lo);
            for (std::size_t i = 0; i < n; ++i) {
                const double center = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
                CHECK(e[i] == doctest::Approx(std::exp(-static_cast<double>(n) * std::abs(center - y))).epsilon(1e-12));
            }
        }
        CHECK_THROWS(soft1hot(0.0, 4, 1.0, 1.0));
    }
}

TEST_SUITE("similarity and entropies")
{
    TEST_CASE("similarity closed forms")
    {
        const double a[] = {0.3, -1.2};
        const double b[] = {0.3 + 0.6, -1.2 + 0.8};  // distance 1
        CHECK(similarity(a, a, 1.0) == 1.0);
        CHECK(similarity(a, b, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
        CHECK(similarity(a, b, 1.0) == similarity(b, a, 1.0));
        const double x[] = {2.0};
        const double y[] = {2.5};
        CHECK(similarity(x, y, 2.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
    }

    TEST_CASE("similarity profiles")
    {
        Rng rng(1);
        const auto p = random_distribution(5, rng);
        const auto ind = similarity_profile(p, indicator_similarity(5));
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(ind[i] == doctest::Approx(p[i]).epsilon(1e-15));
        }
        for (double v : similarity_profile(p, constant_similarity(5, 1.0))) {
            CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
        }
        const DiscreteDistribution q({0.5, 0.25, 0.25});
        const Tensor k = Tensor::matrix(3, 3, {1.0, 0.2, 0.4, 0.2, 1.0, 0.6, 0.4, 0.6, 1.0});
        const double expected[] = {0.5 + 0.25 * 0.2 + 0.25 * 0.4, 0.5 * 0.2 + 0.25 + 0.25 * 0.6,
                                   0.5 * 0.4 + 0.25 * 0.6 + 0.25};
        const auto prof = similarity_profile(q, k);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(prof[i] == doctest::Approx(expected[i]).epsilon(1e-15));
            CHECK(similarity_profile(q, k, i) == prof[i]);
        }
        const double draws[] = {0.2, 0.4, 0.9};
        CHECK(similarity_profile(draws) == doctest::Approx(0.5));
        CHECK_THROWS(similarity_profile(std::span<const double>{}));
    }

    TEST_CASE("distribution validation")
    {
        CHECK_THROWS_AS(DiscreteDistribution({0.5, 0.6}), DistributionError);
        CHECK_THROWS_AS(DiscreteDistribution({-0.1, 1.1}), DistributionError);
        CHECK_NOTHROW(DiscreteDistribution({0.5, 0.5 + 5e-13}));
        const double w[] = {1.0, 3.0};
        CHECK(DiscreteDistribution::from_weights(w)[1] == doctest::Approx(0.75));
    }

    TEST_CASE("entropy closed forms")
    {
        CHECK(shannon_entropy(DiscreteDistribution::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
        CHECK(gait_entropy(DiscreteDistribution::uniform(4), indicator_similarity(4))
              == doctest::Approx(1.3862943611198906).epsilon(1e-15));
        const DiscreteDistribution point({0.0, 1.0, 0.0});
        CHECK(shannon_entropy(point) == 0.0);
        CHECK(gait_entropy(point, indicator_similarity(3)) == 0.0);
        Rng rng(3);
        const auto p = random_distribution(6, rng);
        CHECK(gait_entropy(p, constant_similarity(6, 1.0)) == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(gait_entropy(p, indicator_similarity(6)) == doctest::Approx(shannon_entropy(p)).epsilon(1e-14));
    }

    TEST_CASE("tsallis entropy tends to the geometry-aware entropy as alpha -> 1")
    {
        Rng rng(10);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 8);
            const auto p = random_distribution(n, rng);
            const auto k = random_similarity(n, rng);
            const double h = gait_entropy(p, k);
            CHECK(std::abs(tsallis_entropy(p, k, 1.0 + 1e-3) - h) < 1e-3);
            CHECK(std::abs(tsallis_entropy(p, k, 1.0 - 1e-3) - h) < 1e-3);
            CHECK(tsallis_entropy(p, k, 1.0) == h);
        }
        const auto p = DiscreteDistribution::uniform(2);
        CHECK_THROWS(tsallis_entropy(p, indicator_similarity(2), 2.0));
        CHECK_THROWS(tsallis_entropy(p, indicator_similarity(2), 2.5));
    }
}

TEST_SUITE("objective")
{
    TEST_CASE("plug-in values of the discrete objective")
    {
        const auto u = DiscreteDistribution::uniform(4);
        const auto ind = indicator_similarity(4);
        const std::vector<double> ones(4, 1.0);
        const std::vector<double> fours(4, 4.0);
        CHECK(gem_objective(u, ind, ones) == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(gem_objective(u, ind, fours) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
        const DiscreteDistribution p({0.5, 0.25, 0.25});
        const std::vector<double> inv{2.0, 4.0, 4.0};
        CHECK(gem_objective(p, indicator_similarity(3), inv) == doctest::Approx(1.5 * std::numbers::ln2).epsilon(1e-15));
        const std::vector<double> bad{1.0, 0.0, 1.0};
        CHECK_THROWS_AS(gem_objective(p, indicator_similarity(3), bad), std::domain_error);
    }

    TEST_CASE("the value at g = 1/p_k is the geometry-aware entropy")
    {
        Rng rng(50);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 10);
            const auto p = random_distribution(n, rng);
            const auto k = random_similarity(n, rng);
            const auto pk = similarity_profile(p, k);
            std::vector<double> g(n);
            std::transform(pk.begin(), pk.end(), g.begin(), [](double v) { return 1.0 / v; });
            CHECK(std::abs(gem_objective(p, k, g) - gait_entropy(p, k)) < 1e-10);
            for (double d : gem_objective_gradient(p, k, g)) {
                CHECK(std::abs(d) < 1e-12);
            }
        }
    }

    TEST_CASE("the objective is concave in tabular g")
    {
        Rng rng(8);
        for (int trial = 0; trial < 30; ++trial) {
            const std::size_t n = 3 + uniform_index(rng, 5);
            const auto p = random_distribution(n, rng);
            const auto k = random_similarity(n, rng);
            std::vector<double> g(n);
            std::vector<double> dir(n);
            for (std::size_t i = 0; i < n; ++i) {
                g[i] = uniform(rng, 0.5, 3.0);
                dir[i] = uniform(rng, -1.0, 1.0);
            }
            const double h = 1e-3;
            auto at = [&](double s) {
                std::vector<double> x(n);
                for (std::size_t i = 0; i < n; ++i) {
                    x[i] = g[i] + s * dir[i];
                }
                return gem_objective(p, k, x);
            };
            const double curvature = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
            double expected = 0.0;  // sum_x -p(x) d_x^2 / g_x^2
            for (std::size_t i = 0; i < n; ++i) {
                expected -= p[i] * dir[i] * dir[i] / (g[i] * g[i]);
            }
            CHECK(curvature < 0.0);
            CHECK(curvature == doctest::Approx(expected).epsilon(1e-4));
        }
    }

    TEST_CASE("objective gradient matches finite differences")
    {
        Rng rng(12);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 6);
            const auto p = random_distribution(n, rng);
            const auto k = random_similarity(n, rng);
            for (double alpha : {1.0, 0.5, 1.5}) {
                Tensor g({n});
                for (double& v : g.values()) {
                    v = uniform(rng, 0.5, 3.0);
                }
                const auto analytic = alpha == 1.0 ? gem_objective_gradient(p, k, g.values())
                                                   : tsallis_gem_objective_gradient(p, k, g.values(), alpha);
                Tensor* params[] = {&g};
                const auto fd = ndiff::finite_diff_grad(
                    [&] { return tsallis_gem_objective(p, k, g.values(), alpha); }, params, 1e-6);
                for (std::size_t i = 0; i < n; ++i) {
                    CHECK(analytic[i] == doctest::Approx(fd[0][i]).epsilon(1e-6));
                }
            }
        }
    }

    TEST_CASE("pairwise form: indicator-shaped h reproduces the g form and its maximum")
    {
        Rng rng(9);
        const auto p = random_distribution(5, rng);
        std::vector<double> g(5);
        Tensor h = Tensor::matrix(5, 5);
        for (std::size_t i = 0; i < 5; ++i) {
            g[i] = uniform(rng, 0.5, 4.0);
            h(i, i) = g[i];
        }
        CHECK(gem_objective_pairwise(p, h) == doctest::Approx(gem_objective(p, indicator_similarity(5), g)).epsilon(1e-14));
        for (std::size_t i = 0; i < 5; ++i) {
            h(i, i) = 1.0 / p[i];
        }
        CHECK(gem_objective_pairwise(p, h) == doctest::Approx(shannon_entropy(p)).epsilon(1e-14));
        h(0, 1) = 0.3;  // off-diagonal mass only lowers the value
        CHECK(gem_objective_pairwise(p, h) < shannon_entropy(p));
    }

    TEST_CASE("sample estimate averages the pair terms")
    {
        const double gx[] = {2.0, 4.0};
        const double pg[] = {2.0, 4.0, 4.0};
        const double pk[] = {1.0, 0.5, 0.25};
        const double expected = 0.5 * (std::log(2.0) + std::log(4.0)) - (2.0 + 2.0 + 1.0) / 3.0 + 1.0;
        CHECK(gem_objective_samples(gx, pg, pk) == doctest::Approx(expected).epsilon(1e-15));
        CHECK(tsallis_gem_objective_samples(gx, pg, pk, 1.0) == doctest::Approx(expected).epsilon(1e-15));
    }

    TEST_CASE("tsallis objective: closed forms, maximiser and continuity")
    {
        const auto u = DiscreteDistribution::uniform(2);
        const std::vector<double> two{2.0, 2.0};
        // 1/(a-1) + (1 - 1/(a-1)) 2^(1-a) - 0.5 * 2^(2-a) at a = 0.5
        const double hand = -2.0 + 3.0 * std::sqrt(2.0) - 0.5 * std::pow(2.0, 1.5);
        CHECK(tsallis_gem_objective(u, indicator_similarity(2), two, 0.5) == doctest::Approx(hand).epsilon(1e-14));
        CHECK(hand == doctest::Approx(2.0 * std::sqrt(2.0) - 2.0).epsilon(1e-14));

        Rng rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 8);
            const auto p = random_distribution(n, rng);
            const auto k = random_similarity(n, rng);
            const auto pk = similarity_profile(p, k);
            std::vector<double> g(n);
            std::transform(pk.begin(), pk.end(), g.begin(), [](double v) { return 1.0 / v; });
            for (double alpha : {0.5, 1.5, 1.9, -1.0}) {
                CHECK(tsallis_gem_objective(p, k, g, alpha) == doctest::Approx(tsallis_entropy(p, k, alpha)).epsilon(1e-12));
            }
            std::vector<double> g2(n);
            for (double& v : g2) {
                v = uniform(rng, 0.5, 3.0);
            }
            const double shannon = gem_objective(p, k, g2);
            CHECK(std::abs(tsallis_gem_objective(p, k, g2, 1.0 + 1e-3) - shannon) < 1e-3);
            CHECK(std::abs(tsallis_gem_objective(p, k, g2, 1.0 - 1e-3) - shannon) < 1e-3);
        }
        CHECK_THROWS(tsallis_gem_objective(u, indicator_similarity(2), two, 2.0));
    }

    TEST_CASE("intrinsic reward plug-in values and tabular expectation")
    {
        CHECK(intrinsic_reward(2.0, 3.0, 0.5) == doctest::Approx(-1.8068528194400546).epsilon(1e-15));
        CHECK(intrinsic_reward(2.0, 3.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
        Rng rng(17);
        for (int trial = 0; trial < 10; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 6);
            const auto p = random_distribution(n, rng);
            const auto k = random_similarity(n, rng);
            const auto pk = similarity_profile(p, k);
            std::vector<double> g(n);
            std::transform(pk.begin(), pk.end(), g.begin(), [](double v) { return 1.0 / v; });
            double expected_reward = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    expected_reward += p[i] * p[j] * intrinsic_reward(g[i], g[j], k(i, j));
                }
            }
            // E[r] = E ln g - 2 E[k g(x)] = (objective - 1) - E[g p_k] = H_k - 2 at the maximiser.
            CHECK(expected_reward == doctest::Approx(gem_objective(p, k, g) - 2.0).epsilon(1e-12));
            CHECK(expected_reward == doctest::Approx(gait_entropy(p, k) - 2.0).epsilon(1e-12));
        }
    }
}

TEST_SUITE("model and minibatch loss")
{
    TEST_CASE("g is strictly positive and k(x, x) = 1")
    {
        Rng rng(2);
        const auto model = GemModel::create(3, {8}, 3, {8, 4}, GemHyper{}, rng);
        Tensor x = random_inputs(6, 3, rng);
        x(0, 0) = 1e6;
        x(1, 1) = -1e6;
        for (double g : model.g(x)) {
            CHECK(g > 0.0);
            CHECK(std::isfinite(g));
        }
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(model.similarity(x, i, x, i) == 1.0);
        }
        CHECK(model.similarity(x, 2, x, 3) == doctest::Approx(model.similarity(x, 3, x, 2)).epsilon(1e-15));
    }

    TEST_CASE("single identical pair: reward and loss by hand")
    {
        GemHyper hyper;
        hyper.w_reg = 0.0;
        const GemModel model(constant_g(2, 2.0), std::nullopt, hyper);
        const auto b = GemBatch::same(Tensor::matrix(1, 2, {0.3, 0.7}));
        const std::size_t neg[] = {0};
        const auto r = gem_loss_minibatch(model, b, b, neg);
        CHECK(r.rewards[0] == doctest::Approx(1.0 + std::log(2.0) - 4.0).epsilon(1e-12));
        CHECK(r.rewards[0] == doctest::Approx(-2.306853).epsilon(1e-6));
        CHECK(r.loss == doctest::Approx(1.0 + std::log(2.0) - 2.0).epsilon(1e-12));
        CHECK(r.loss == doctest::Approx(-0.306853).epsilon(1e-6));
    }

    TEST_CASE("zero embeddings make the regulariser vanish")
    {
        GemHyper hyper;
        hyper.w_reg = 0.5;
        const GemModel model(constant_g(2, 1.5), std::nullopt, hyper);
        const auto b = GemBatch::same(Tensor::matrix(3, 2));
        Rng rng(0);
        const auto r = gem_loss_minibatch(model, b, b, rng);
        CHECK(r.regularizer == 0.0);
        CHECK(r.loss == r.objective);
    }

    TEST_CASE("minibatch values equal a brute-force enumeration of anchor/negative pairs")
    {
        for (double alpha : {1.0, 0.5, 1.5}) {
            Rng rng(70);
            GemHyper hyper;
            hyper.c = 1.3;
            hyper.w_reg = 0.01;
            hyper.alpha = alpha;
            auto model = GemModel::create(3, {6}, 3, {5, 2}, hyper, rng);
            const auto b1 = GemBatch::same(random_inputs(2, 3, rng));
            const auto b2 = GemBatch::same(random_inputs(3, 3, rng));
            const std::size_t neg[] = {0, 2, 2, 1, 0, 0};
            const std::size_t m = 3;
            const auto r = gem_loss_minibatch(model, b1, b2, neg, false);
            const auto g1 = model.g(b1.g_input);
            const auto g2 = model.g(b2.g_input);
            const auto f1 = model.embed(b1.f_input);
            double objective = 0.0;
            double reg = 0.0;
            for (std::size_t i = 0; i < 2; ++i) {
                std::vector<double> gx{g1[i]};
                std::vector<double> pair_g;
                std::vector<double> pair_k;
                double reward = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    const std::size_t idx = neg[i * m + j];
                    const double k = model.similarity(b1.f_input, i, b2.f_input, idx);
                    pair_g.push_back(g1[i]);
                    pair_k.push_back(k);
                    reward -= (std::pow(g1[i], 2.0 - alpha) + std::pow(g2[idx], 2.0 - alpha)) * k / m;
                }
                const double obj_i = tsallis_gem_objective_samples(gx, pair_g, pair_k, alpha);
                // Reward is the objective term with the negative's g added symmetrically.
                const double base = obj_i + std::pow(g1[i], 2.0 - alpha)
                                                * std::accumulate(pair_k.begin(), pair_k.end(), 0.0) / m;
                CHECK(r.rewards[i] == doctest::Approx(base + reward).epsilon(1e-12));
                objective += obj_i / 2.0;
                for (std::size_t c = 0; c < f1.cols(); ++c) {
                    reg += f1(i, c) * f1(i, c) / 2.0;
                }
            }
            CHECK(r.objective == doctest::Approx(objective).epsilon(1e-12));
            CHECK(r.regularizer == doctest::Approx(reg).epsilon(1e-12));
            CHECK(r.loss == doctest::Approx(objective + 0.01 * reg).epsilon(1e-12));
            CHECK(r.minimized == doctest::Approx(-objective + 0.01 * reg).epsilon(1e-12));
        }
    }

    TEST_CASE("negatives are drawn with replacement even when n_neg exceeds the pool")
    {
        Rng rng(5);
        const auto idx = sample_negatives(4, 2, 8, rng);
        CHECK(idx.size() == 32);
        for (auto i : idx) {
            CHECK(i < 2);
        }
        CHECK_THROWS(sample_negatives(1, 0, 1, rng));
    }

    TEST_CASE("minibatch loss gradients match central differences")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(100 + seed);
            GemHyper hyper;
            hyper.c = 0.7;
            hyper.w_reg = 0.05;
            hyper.n_neg = 3;
            hyper.alpha = seed % 3 == 0 ? 1.5 : (seed % 3 == 1 ? 1.0 : 0.6);
            auto model = GemModel::create(4, {6, 5}, 4, {6, 3}, hyper, rng);
            jitter(model.g_net(), rng);
            jitter(model.f_net(), rng);
            const auto b1 = GemBatch::same(random_inputs(4, 4, rng));
            const auto b2 = GemBatch::same(random_inputs(5, 4, rng));
            const auto neg = sample_negatives(4, 5, 3, rng);
            const auto r = gem_loss_minibatch(model, b1, b2, neg);
            auto value = [&] { return gem_loss_minibatch(model, b1, b2, neg, false).minimized; };
            const auto g_params = model.g_net().parameters();
            const auto f_params = model.f_net().parameters();
            CHECK(ndiff::max_relative_error(r.g_grads, ndiff::finite_diff_grad(value, g_params, 1e-5)) < 1e-4);
            CHECK(ndiff::max_relative_error(r.f_grads, ndiff::finite_diff_grad(value, f_params, 1e-5)) < 1e-4);
        }
    }

    TEST_CASE("identity embedding gives no f gradients")
    {
        Rng rng(3);
        const auto model = GemModel::create(2, {4}, 2, {}, GemHyper{}, rng);
        CHECK_FALSE(model.learned_embedding());
        CHECK_THROWS((void)model.f_net());
        const auto b = GemBatch::same(random_inputs(3, 2, rng));
        const auto r = gem_loss_minibatch(model, b, b, rng);
        CHECK(r.f_grads.empty());
        CHECK(r.g_grads.size() == model.g_net().parameters().size());
    }
}

TEST_SUITE("adjacency regulariser")
{
    TEST_CASE("closed forms")
    {
        const Tensor a = Tensor::matrix(2, 2, {0.0, 0.0, 1.0, 1.0});
        const Tensor b = Tensor::matrix(2, 2, {0.0, 0.8, 1.3, 1.4});  // distances 0.8 and 0.5
        CHECK(ar_loss_value(a, a, 4.0, 1.0) == 1.0);
        CHECK(ar_loss_value(a, b, 1.0, 0.0) == doctest::Approx(0.65).epsilon(1e-14));
        const Tensor c = Tensor::matrix(1, 1, {0.0});
        const Tensor d = Tensor::matrix(1, 1, {0.8});
        CHECK(ar_loss_value(c, d, 4.0, 0.6) == doctest::Approx(std::pow(std::pow(0.6, 4) + std::pow(0.8, 4), 0.25)).epsilon(1e-15));
        CHECK_THROWS(ar_loss_value(Tensor::matrix(0, 1), Tensor::matrix(0, 1), 4.0, 1.0));
    }

    TEST_CASE("a constant embedding gives exactly 1 at delta 1, q 4")
    {
        Rng rng(1);
        auto model = GemModel::create(3, {4}, 3, {4, 2}, GemHyper{}, rng);
        for (Tensor* p : model.f_net().parameters()) {
            p->fill(0.0);
        }
        model.f_net().layers().back().bias = Tensor::vector({0.4, -0.2});
        const auto r = ar_loss(model, random_inputs(5, 3, rng), random_inputs(5, 3, rng), ArConfig{4.0, 1.0, 1.0});
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("gradients match central differences")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            Rng rng(200 + seed);
            auto model = GemModel::create(3, {4}, 3, {6, 3}, GemHyper{}, rng);
            jitter(model.f_net(), rng);
            const Tensor from = random_inputs(6, 3, rng);
            const Tensor to = random_inputs(6, 3, rng);
            const ArConfig cfg{1.0 + 4.0 * uniform01(rng), uniform(rng, 0.2, 1.5), 1.0};
            const auto r = ar_loss(model, from, to, cfg);
            const auto params = model.f_net().parameters();
            const auto fd = ndiff::finite_diff_grad([&] { return ar_loss(model, from, to, cfg, false).value; }, params, 1e-5);
            CHECK(ndiff::max_relative_error(r.f_grads, fd) < 1e-4);
        }
    }

    TEST_CASE("config validation")
    {
        CHECK_THROWS(ArConfig{0.5, 1.0, 1.0}.validate());
        CHECK_THROWS(ArConfig{4.0, 0.0, 1.0}.validate());
        CHECK_THROWS(ArConfig{4.0, 1.0, -1.0}.validate());
        CHECK_NOTHROW(ArConfig{1.0, 0.3, 0.0}.validate());
    }
}

TEST_SUITE("reward normaliser")
{
    TEST_CASE("fresh normaliser with unit targets is the identity")
    {
        RewardNormalizer n;
        const double batch[] = {-1.5, 0.0, 2.25};
        const auto out = n.apply(batch);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(out[i] == batch[i]);
        }
    }

    TEST_CASE("a constant batch maps to the target mean")
    {
        RewardNormalizer n;
        n.target_scale = 0.3;
        n.target_mean = 0.7;
        const std::vector<double> batch(5, 2.5);
        for (double v : normalize_reward(n, batch)) {
            CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
        }
        CHECK(n.sigma() == n.sigma_floor);
    }

    TEST_CASE("running statistics follow a straight-line EMA recomputation")
    {
        RewardNormalizer n;
        n.target_scale = 0.005;
        n.target_mean = 0.005;
        Rng rng(44);
        double mu = 0.0;
        double var = 1.0;
        bool first = true;
        for (int step = 0; step < 50; ++step) {
            std::vector<double> batch(1 + uniform_index(rng, 20));
            for (double& v : batch) {
                v = 3.0 + 2.0 * standard_normal(rng);
            }
            const double bm = std::accumulate(batch.begin(), batch.end(), 0.0) / batch.size();
            double bv = 0.0;
            for (double v : batch) {
                bv += (v - bm) * (v - bm) / batch.size();
            }
            if (first) {
                mu = bm;
                var = bv;
                first = false;
            } else {
                mu = 0.99 * mu + 0.01 * bm;
                var = 0.99 * var + 0.01 * bv;
            }
            const auto out = normalize_reward(n, batch);
            CHECK(n.mean == doctest::Approx(mu).epsilon(1e-13));
            CHECK(n.variance == doctest::Approx(var).epsilon(1e-13));
            for (std::size_t i = 0; i < batch.size(); ++i) {
                CHECK(out[i] == doctest::Approx(0.005 * (batch[i] - mu) / std::max(std::sqrt(var), 1e-6) + 0.005).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("permuting a batch permutes the outputs")
    {
        RewardNormalizer a;
        RewardNormalizer b;
        std::vector<double> batch{0.3, -1.0, 2.0, 5.5, 0.1};
        std::vector<double> rev(batch.rbegin(), batch.rend());
        const auto oa = normalize_reward(a, batch);
        const auto ob = normalize_reward(b, rev);
        for (std::size_t i = 0; i < batch.size(); ++i) {
            CHECK(oa[i] == doctest::Approx(ob[batch.size() - 1 - i]).epsilon(1e-15));
        }
    }
}
