#include "gem/core/objective.hpp"
#include "gem/oracles/bimodal.hpp"
#include "gem/oracles/collapse.hpp"
#include "gem/oracles/policy_search.hpp"
#include "gem/oracles/tabular_mdp.hpp"
#include "gem/oracles/tracker.hpp"
#include "stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace gem;
using namespace gem::oracles;
using core::gait_entropy;
using core::indicator_similarity;

namespace {

TabularPolicy random_policy(const TabularMdp& mdp, Rng& rng)
{
    TabularPolicy pol = TabularPolicy::uniform(mdp);
    for (std::size_t r = 0; r < pol.probs.size() / mdp.n_actions; ++r) {
        double total = 0.0;
        for (std::size_t a = 0; a < mdp.n_actions; ++a) {
            total += pol.probs[r * mdp.n_actions + a] = 0.05 + uniform01(rng);
        }
        for (std::size_t a = 0; a < mdp.n_actions; ++a) {
            pol.probs[r * mdp.n_actions + a] /= total;
        }
    }
    return pol;
}

// Two states; action 0 stays, action 1 swaps.
TabularMdp stay_or_swap(std::size_t horizon, std::vector<double> initial)
{
    TabularMdp mdp{2, 2, horizon, std::vector<double>(8, 0.0), std::move(initial)};
    for (std::size_t s = 0; s < 2; ++s) {
        mdp.p(s, 0, s) = 1.0;
        mdp.p(s, 1, 1 - s) = 1.0;
    }
    return mdp;
}

Tensor gaussian_profile(std::size_t n, double width)
{
    Tensor k = Tensor::matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = static_cast<double>(i) - static_cast<double>(j);
            k(i, j) = std::exp(-d * d / (2.0 * width * width));
        }
    }
    return k;
}

// The two mixture components meet at the support midpoint with a jump in the density, so
// integrate each side separately using one-sided limits.
double density_integral(const BimodalSpec& spec, double lo, double hi, std::size_t nodes)
{
    const double mid = 0.5 * (spec.support_lo() + spec.support_hi());
    const double eps = 1e-12;
    auto left = [&](double x) { return bimodal_density(spec, std::min(x, mid - eps)); };
    auto right = [&](double x) { return bimodal_density(spec, std::max(x, mid + eps)); };
    if (hi <= mid) {
        return simpson(left, lo, hi, nodes);
    }
    if (lo >= mid) {
        return simpson(right, lo, hi, nodes);
    }
    return simpson(left, lo, mid, nodes) + simpson(right, mid, hi, nodes);
}

}  // namespace

TEST_SUITE("exact visitation")
{
    TEST_CASE("closed-form examples")
    {
        const auto swap = stay_or_swap(2, {1.0, 0.0});
        TabularPolicy always_swap = TabularPolicy::uniform(swap);
        always_swap(0, 0, 0) = 0.0;
        always_swap(0, 0, 1) = 1.0;
        always_swap(0, 1, 0) = 0.0;
        always_swap(0, 1, 1) = 1.0;
        const auto v = exact_visitation(swap, always_swap);
        CHECK(v[0] == 0.5);
        CHECK(v[1] == 0.5);

        Rng rng(3);
        const std::vector<double> init{0.2, 0.8};
        const auto stay = stay_or_swap(5, init);
        TabularPolicy hold = TabularPolicy::uniform(stay);
        for (std::size_t t = 0; t < hold.steps; ++t) {
            for (std::size_t s = 0; s < 2; ++s) {
                hold(t, s, 0) = 1.0;
                hold(t, s, 1) = 0.0;
            }
        }
        const auto id = exact_visitation(stay, hold);
        CHECK(id[0] == doctest::Approx(0.2).epsilon(1e-15));
        CHECK(id[1] == doctest::Approx(0.8).epsilon(1e-15));
    }

    TEST_CASE("every marginal is a distribution")
    {
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            const auto mdp = TabularMdp::random(2 + uniform_index(rng, 5), 2 + uniform_index(rng, 3), 1 + uniform_index(rng, 6), rng);
            const auto detail = exact_visitation_detail(mdp, random_policy(mdp, rng));
            CHECK(detail.marginals.size() == mdp.horizon);
            for (const auto& m : detail.marginals) {
                CHECK(std::accumulate(m.begin(), m.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("invalid inputs are rejected")
    {
        auto mdp = stay_or_swap(3, {1.0, 0.0});
        TabularPolicy pol = TabularPolicy::uniform(mdp);
        pol(1, 0, 0) = 0.9;
        CHECK_THROWS(exact_visitation(mdp, pol));
        mdp.p(0, 0, 0) = 0.5;
        CHECK_THROWS_AS(mdp.validate(), MdpError);
        CHECK_THROWS_AS(stay_or_swap(3, {0.3, 0.3}).validate(), MdpError);
    }

    TEST_CASE("random 4-state MDP agrees with 10^6 sampled episodes")
    {
        Rng rng(2024);
        const auto mdp = TabularMdp::random(4, 3, 4, rng);
        const auto pol = random_policy(mdp, rng);
        const auto exact = exact_visitation(mdp, pol);
        const std::size_t episodes = 1000000;
        std::vector<double> sum(4, 0.0);
        std::vector<double> sum_sq(4, 0.0);
        for (std::size_t e = 0; e < episodes; ++e) {
            const auto ep = sample_episode(mdp, pol, rng);
            REQUIRE(ep.states.size() == 4);
            REQUIRE(ep.actions.size() == 3);
            std::vector<double> frac(4, 0.0);
            for (auto s : ep.states) {
                frac[s] += 0.25;
            }
            for (std::size_t s = 0; s < 4; ++s) {
                sum[s] += frac[s];
                sum_sq[s] += frac[s] * frac[s];
            }
        }
        for (std::size_t s = 0; s < 4; ++s) {
            const double mean = sum[s] / episodes;
            const double var = sum_sq[s] / episodes - mean * mean;
            CHECK(std::abs(mean - exact[s]) <= 3.0 * std::sqrt(var / episodes));
        }
    }

    TEST_CASE("objective at the maximiser equals the entropy of the exact visitation")
    {
        Rng rng(77);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 2 + uniform_index(rng, 6);
            const auto mdp = TabularMdp::random(n, 2 + uniform_index(rng, 2), 2 + uniform_index(rng, 5), rng);
            const auto p = exact_visitation(mdp, random_policy(mdp, rng));
            Tensor k = Tensor::matrix(n, n);
            for (std::size_t i = 0; i < n; ++i) {
                k(i, i) = 1.0;
                for (std::size_t j = 0; j < i; ++j) {
                    k(i, j) = k(j, i) = uniform(rng, 0.0, 0.9);
                }
            }
            const auto pk = core::similarity_profile(p, k);
            std::vector<double> g(n);
            std::transform(pk.begin(), pk.end(), g.begin(), [](double v) { return 1.0 / v; });
            CHECK(std::abs(core::gem_objective(p, k, g) - gait_entropy(p, k)) < 1e-10);
        }
    }

    TEST_CASE("exact policy objective is evaluated on the exact visitation")
    {
        Rng rng(8);
        const auto mdp = TabularMdp::random(3, 2, 3, rng);
        std::vector<double> logits(3 * 2 * 2);
        for (double& l : logits) {
            l = uniform(rng, -1.0, 1.0);
        }
        const std::vector<double> g{1.5, 2.0, 0.7};
        const Tensor k = gaussian_profile(3, 1.0);
        const auto p = exact_visitation(mdp, TabularPolicy::softmax(mdp, logits));
        CHECK(exact_gem_policy_objective(mdp, logits, k, g) == doctest::Approx(core::gem_objective(p, k, g)).epsilon(1e-14));
    }
}

TEST_SUITE("policy search")
{
    TEST_CASE("symmetric two-state problem reaches ln 2")
    {
        const auto mdp = stay_or_swap(2, {1.0, 0.0});
        const auto res = max_entropy_policy_search(mdp, indicator_similarity(2));
        CHECK(res.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-9));
        const auto v = exact_visitation(mdp, res.policy);
        CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-6));
        CHECK(res.grid_policies > 0);
    }

    TEST_CASE("constant similarity scores every policy at 0")
    {
        Rng rng(1);
        const auto mdp = TabularMdp::random(3, 2, 3, rng);
        const auto res = max_entropy_policy_search(mdp, core::constant_similarity(3, 1.0));
        CHECK(res.entropy == doctest::Approx(0.0).epsilon(1e-12));
    }

    TEST_CASE("chain search is reproduced by two seeds and matches the grid")
    {
        const auto mdp = TabularMdp::chain(3, 3);
        const auto k = indicator_similarity(3);
        PolicySearchOptions a;
        a.seed = 1;
        PolicySearchOptions b;
        b.seed = 99;
        const auto ra = max_entropy_policy_search(mdp, k, a);
        const auto rb = max_entropy_policy_search(mdp, k, b);
        CHECK(ra.grid_policies > 0);
        CHECK(ra.entropy == doctest::Approx(rb.entropy).epsilon(1e-9));
        // From state 0 over 3 steps, visiting 0, 1, 2 once each is achievable.
        CHECK(ra.entropy == doctest::Approx(std::log(3.0)).epsilon(1e-9));
    }

    TEST_CASE("random MDP: search dominates random policies and has a small duality gap")
    {
        Rng rng(12);
        const auto mdp = TabularMdp::random(4, 2, 4, rng);
        const auto k = gaussian_profile(4, 1.0);
        const auto res = max_entropy_policy_search(mdp, k);
        CHECK(res.gap < 1e-4);
        for (int i = 0; i < 200; ++i) {
            CHECK(visitation_entropy(mdp, random_policy(mdp, rng), k) <= res.entropy + 1e-12);
        }
    }

    TEST_CASE("size bound")
    {
        Rng rng(1);
        const auto mdp = TabularMdp::random(50, 5, 20, rng);
        CHECK_THROWS_AS(max_entropy_policy_search(mdp, indicator_similarity(50)), SearchBoundExceeded);
    }

    TEST_CASE("simplex projection")
    {
        std::vector<double> v{0.5, 0.5, 0.5};
        project_to_simplex(v);
        for (double x : v) {
            CHECK(x == doctest::Approx(1.0 / 3.0));
        }
        std::vector<double> w{2.0, 0.0, -1.0};
        project_to_simplex(w);
        CHECK(w[0] == doctest::Approx(1.0));
        CHECK(w[1] == 0.0);
        CHECK(w[2] == 0.0);
    }
}

TEST_SUITE("bimodal")
{
    TEST_CASE("density integrates to one and vanishes outside the support")
    {
        const BimodalSpec spec;
        CHECK(spec.support_lo() == 0.0);
        CHECK(spec.support_hi() == 30.0);
        const double mass = density_integral(spec, 0.0, 30.0, 3001);
        CHECK(std::abs(mass - 1.0) < 1e-6);
        // A single Simpson pass with a node on the jump double-counts the boundary value.
        const double naive = simpson([&](double x) { return bimodal_density(spec, x); }, 0.0, 30.0, 3001);
        CHECK(std::abs(naive - 1.0) < 1e-4);
        for (double x : {-1e-9, -3.0, 30.0 + 1e-9, 45.0}) {
            CHECK(bimodal_density(spec, x) == 0.0);
        }
        CHECK(bimodal_density(spec, 7.5) > 0.0);
    }

    TEST_CASE("simpson rule is exact for cubics")
    {
        const double v = simpson([](double x) { return x * x * x - 2.0 * x; }, -1.0, 2.0, 5);
        CHECK(v == doctest::Approx(15.0 / 4.0 - 3.0).epsilon(1e-13));
        const auto w = simpson_weights(0.0, 1.0, 7);
        CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK_THROWS(simpson_weights(0.0, 1.0, 4));
    }

    TEST_CASE("sampler histogram matches the bin probabilities")
    {
        const BimodalSpec spec;
        Rng rng(11);
        const std::size_t draws = 1000000;
        std::vector<double> hist(30, 0.0);
        for (std::size_t i = 0; i < draws; ++i) {
            const double x = bimodal_sample(spec, rng);
            REQUIRE(x >= 0.0);
            REQUIRE(x <= 30.0);
            hist[std::min<std::size_t>(29, static_cast<std::size_t>(x))] += 1.0;
        }
        double chi2 = 0.0;
        for (std::size_t b = 0; b < 30; ++b) {
            const double p = density_integral(spec, b, b + 1.0, 301);
            CHECK(test::binomial_within(hist[b], draws, p, 3.5));
            chi2 += (hist[b] - draws * p) * (hist[b] - draws * p) / (draws * p);
        }
        CHECK(chi2 < test::chi2_upper(29.0, 3.0));
    }

    TEST_CASE("discretised variant")
    {
        const BimodalSpec spec;
        const auto pts = bimodal_points(spec);
        const auto d = bimodal_discretized(spec);
        REQUIRE(pts.size() == 30);
        CHECK(pts.front() == 0.0);
        CHECK(pts.back() == 30.0);
        double total = 0.0;
        for (std::size_t i = 0; i < 30; ++i) {
            total += bimodal_density(spec, pts[i]);
        }
        for (std::size_t i = 0; i < 30; ++i) {
            CHECK(d[i] == doctest::Approx(bimodal_density(spec, pts[i]) / total).epsilon(1e-14));
        }
    }

    TEST_CASE("truncated normal stays in range")
    {
        Rng rng(2);
        for (int i = 0; i < 10000; ++i) {
            CHECK(std::abs(truncated_normal(2.0, rng)) <= 2.0);
        }
    }
}

TEST_SUITE("tracker")
{
    TEST_CASE("single repeated state")
    {
        VisitationTracker t(5);
        const std::size_t v[] = {3, 3, 3};
        const auto r = track_and_entropy(t, v);
        CHECK_FALSE(r.empty);
        CHECK(r.entropy == 0.0);
        CHECK(r.heatmap[3] == 1.0);
        CHECK(r.heatmap[0] == 0.0);
    }

    TEST_CASE("empty tracker")
    {
        VisitationTracker t(4);
        const auto r = track_and_entropy(t, {});
        CHECK(r.empty);
        CHECK(r.entropy == 0.0);
        for (double h : r.heatmap) {
            CHECK(h == 0.0);
        }
        CHECK_THROWS(VisitationTracker(4, 0.0));
        CHECK_THROWS(VisitationTracker(4, 1.5));
        CHECK_THROWS(t.record(std::vector<std::size_t>{4}));
    }

    TEST_CASE("counts follow a straight-line EMA recomputation")
    {
        VisitationTracker t(3, 0.9);
        const std::vector<std::vector<std::size_t>> script{{0}, {1, 1}, {}, {2, 0}};
        std::vector<double> c(3, 0.0);
        for (const auto& batch : script) {
            for (double& x : c) {
                x *= 0.9;
            }
            for (auto s : batch) {
                c[s] += 1.0;
            }
            t.record(batch);
        }
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(t.counts()[i] == doctest::Approx(c[i]).epsilon(1e-15));
        }
        const double total = c[0] + c[1] + c[2];
        double h = 0.0;
        for (double x : c) {
            h -= x / total * std::log(x / total);
        }
        CHECK(t.entropy() == doctest::Approx(h).epsilon(1e-14));
        const double top = *std::max_element(c.begin(), c.end());
        CHECK(t.heatmap()[1] == doctest::Approx(c[1] / top).epsilon(1e-15));
    }

    TEST_CASE("uniform visit streams approach ln m")
    {
        const std::size_t m = 6;
        VisitationTracker cyclic(m);
        double previous = -1.0;
        for (std::size_t step = 0; step < 3000; ++step) {
            const std::size_t v[] = {step % m};
            cyclic.record(v);
            if (step % m == m - 1 && step > 600) {
                CHECK(cyclic.entropy() >= previous - 1e-12);
                previous = cyclic.entropy();
            }
        }
        CHECK(std::abs(cyclic.entropy() - std::log(static_cast<double>(m))) < 1e-2);

        VisitationTracker random(m);
        Rng rng(4);
        for (int step = 0; step < 2000; ++step) {
            std::vector<std::size_t> batch(256);
            for (auto& s : batch) {
                s = uniform_index(rng, m);
            }
            random.record(batch);
        }
        CHECK(std::abs(random.entropy() - std::log(static_cast<double>(m))) < 1e-2);
    }
}

TEST_SUITE("collapse harness")
{
    TEST_CASE("report layout without training")
    {
        const BimodalSpec spec;
        CollapseSettings s;
        s.steps = 0;
        s.hidden = 8;
        s.embed_dim = 4;
        s.quadrature_nodes = 101;
        const auto reports = collapse_harness(spec, CollapseVariant::all(), s);
        REQUIRE(reports.size() == 4);
        for (const auto& r : reports) {
            CHECK(r.untrained);
            const std::size_t n = r.variant.discrete ? 30 : 101;
            CHECK(r.x.size() == n);
            CHECK(r.truth.size() == n);
            CHECK(r.implied.size() == n);
            CHECK(r.reference.size() == n);
            if (r.variant.learned_similarity) {
                CHECK(r.reference == r.truth);
            }
            if (r.variant.discrete) {
                CHECK(std::accumulate(r.implied.begin(), r.implied.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
                CHECK(r.truth_entropy == doctest::Approx(core::shannon_entropy(bimodal_discretized(spec))).epsilon(1e-12));
            }
        }
        CHECK(reports[0].variant.name() == "discrete-fixed-k");
        CHECK(reports[3].variant.name() == "continuous-learned-k");
    }

    TEST_CASE("short discrete fixed-k run moves towards the reference")
    {
        const BimodalSpec spec;
        CollapseSettings s;
        s.hidden = 32;
        s.embed_dim = 8;
        s.batch_size = 64;
        s.steps = 0;
        const CollapseVariant v{true, false};
        const auto before = run_collapse_variant(spec, v, s);
        s.steps = 200;
        s.learning_rate = 3e-3;
        const auto after = run_collapse_variant(spec, v, s);
        CHECK(after.error < before.error);
    }
}
