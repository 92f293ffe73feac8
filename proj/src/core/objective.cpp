#include "gem/core/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace gem::core {

namespace {

void check_g(const DiscreteDistribution& p, std::span<const double> g)
{
    if (g.size() != p.size()) {
        throw ndiff::ShapeError("g has " + std::to_string(g.size()) + " entries for a support of size "
                                + std::to_string(p.size()));
    }
    for (double v : g) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::domain_error("g must be finite and strictly positive");
        }
    }
}

void check_positive(std::span<const double> g)
{
    for (double v : g) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::domain_error("g must be finite and strictly positive");
        }
    }
}

double mean(std::span<const double> v)
{
    if (v.empty()) {
        throw std::invalid_argument("empty sample set");
    }
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

}  // namespace

double gem_objective(const DiscreteDistribution& p, const Tensor& k, std::span<const double> g)
{
    check_g(p, g);
    const auto pk = similarity_profile(p, k);
    double value = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            value += p[i] * (std::log(g[i]) - pk[i] * g[i]);
        }
    }
    return value;
}

std::vector<double> gem_objective_gradient(const DiscreteDistribution& p, const Tensor& k,
                                           std::span<const double> g)
{
    check_g(p, g);
    const auto pk = similarity_profile(p, k);
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = p[i] * (1.0 / g[i] - pk[i]);
    }
    return out;
}

double gem_objective_pairwise(const DiscreteDistribution& p, const Tensor& h)
{
    if (h.rank() != 2 || h.rows() != p.size() || h.cols() != p.size()) {
        throw ndiff::ShapeError("pair function does not match support");
    }
    double value = 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) {
            continue;
        }
        if (!(h(i, i) > 0.0)) {
            throw std::domain_error("h(x, x) must be strictly positive on the support");
        }
        value += p[i] * std::log(h(i, i));
        for (std::size_t j = 0; j < p.size(); ++j) {
            value -= p[i] * p[j] * h(i, j);
        }
    }
    return value;
}

double gem_objective_samples(std::span<const double> g_x, std::span<const double> pair_g,
                             std::span<const double> pair_k)
{
    check_positive(g_x);
    check_positive(pair_g);
    if (pair_g.size() != pair_k.size()) {
        throw ndiff::ShapeError("pair arrays differ in length");
    }
    double log_mean = 0.0;
    for (double v : g_x) {
        log_mean += std::log(v);
    }
    log_mean /= static_cast<double>(g_x.size());
    double neg = 0.0;
    for (std::size_t j = 0; j < pair_g.size(); ++j) {
        neg += pair_g[j] * pair_k[j];
    }
    neg /= static_cast<double>(pair_g.size());
    return log_mean - neg + 1.0;
}

double tsallis_gem_objective(const DiscreteDistribution& p, const Tensor& k, std::span<const double> g,
                             double alpha)
{
    check_tsallis_order(alpha);
    if (alpha == 1.0) {
        return gem_objective(p, k, g);
    }
    check_g(p, g);
    const auto pk = similarity_profile(p, k);
    const double inv = 1.0 / (alpha - 1.0);
    double value = inv;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            value += p[i] * ((1.0 - inv) * std::pow(g[i], 1.0 - alpha) - pk[i] * std::pow(g[i], 2.0 - alpha));
        }
    }
    return value;
}

std::vector<double> tsallis_gem_objective_gradient(const DiscreteDistribution& p, const Tensor& k,
                                                   std::span<const double> g, double alpha)
{
    check_tsallis_order(alpha);
    if (alpha == 1.0) {
        return gem_objective_gradient(p, k, g);
    }
    check_g(p, g);
    const auto pk = similarity_profile(p, k);
    std::vector<double> out(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        out[i] = p[i] * (2.0 - alpha) * (std::pow(g[i], -alpha) - pk[i] * std::pow(g[i], 1.0 - alpha));
    }
    return out;
}

double tsallis_gem_objective_samples(std::span<const double> g_x, std::span<const double> pair_g,
                                     std::span<const double> pair_k, double alpha)
{
    check_tsallis_order(alpha);
    if (alpha == 1.0) {
        return gem_objective_samples(g_x, pair_g, pair_k);
    }
    check_positive(g_x);
    check_positive(pair_g);
    if (pair_g.size() != pair_k.size()) {
        throw ndiff::ShapeError("pair arrays differ in length");
    }
    const double inv = 1.0 / (alpha - 1.0);
    std::vector<double> pos(g_x.size());
    for (std::size_t i = 0; i < g_x.size(); ++i) {
        pos[i] = std::pow(g_x[i], 1.0 - alpha);
    }
    std::vector<double> neg(pair_g.size());
    for (std::size_t j = 0; j < pair_g.size(); ++j) {
        neg[j] = pair_k[j] * std::pow(pair_g[j], 2.0 - alpha);
    }
    return inv + (1.0 - inv) * mean(pos) - mean(neg);
}

double intrinsic_reward(double g_x, double g_xp, double k)
{
    return std::log(g_x) - k * (g_x + g_xp);
}

}  // namespace gem::core
