#include "gem/core/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gem::core {

namespace {

void check_square(const DiscreteDistribution& p, const Tensor& k)
{
    if (k.rank() != 2 || k.rows() != p.size() || k.cols() != p.size()) {
        throw ndiff::ShapeError("similarity matrix " + k.shape_string() + " does not match support of size "
                                + std::to_string(p.size()));
    }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs, std::vector<std::string> labels)
    : probs_(std::move(probs)), labels_(std::move(labels))
{
    if (probs_.empty()) {
        throw DistributionError("empty distribution");
    }
    if (!labels_.empty() && labels_.size() != probs_.size()) {
        throw DistributionError("label count does not match support size");
    }
    double total = 0.0;
    for (double v : probs_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DistributionError("probabilities must be finite and non-negative");
        }
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw DistributionError("probabilities sum to " + std::to_string(total));
    }
}

DiscreteDistribution DiscreteDistribution::from_weights(std::span<const double> weights)
{
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw DistributionError("weights must be finite and non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw DistributionError("weights sum to zero");
    }
    std::vector<double> probs(weights.begin(), weights.end());
    for (double& v : probs) {
        v /= total;
    }
    // Push the rounding residue onto the largest entry so the sum is exact to 1e-12.
    const double residue = 1.0 - std::accumulate(probs.begin(), probs.end(), 0.0);
    auto largest = std::max_element(probs.begin(), probs.end());
    *largest += residue;
    return DiscreteDistribution(std::move(probs));
}

DiscreteDistribution DiscreteDistribution::uniform(std::size_t n)
{
    std::vector<double> w(n, 1.0);
    return from_weights(w);
}

double similarity(std::span<const double> a, std::span<const double> b, double c)
{
    if (a.size() != b.size()) {
        throw ndiff::ShapeError("similarity arguments differ in length");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sq += d * d;
    }
    return std::exp(-c * std::sqrt(sq));
}

Tensor indicator_similarity(std::size_t n)
{
    Tensor k = Tensor::matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        k(i, i) = 1.0;
    }
    return k;
}

Tensor constant_similarity(std::size_t n, double value)
{
    return Tensor::matrix(n, n, value);
}

Tensor gaussian_similarity(std::span<const double> points, double bandwidth)
{
    const std::size_t n = points.size();
    Tensor k = Tensor::matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = points[i] - points[j];
            k(i, j) = std::exp(-d * d / (2.0 * bandwidth * bandwidth));
        }
    }
    return k;
}

std::vector<double> similarity_profile(const DiscreteDistribution& p, const Tensor& k)
{
    check_square(p, k);
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
            out[i] += p[j] * k(i, j);
        }
    }
    return out;
}

double similarity_profile(const DiscreteDistribution& p, const Tensor& k, std::size_t x)
{
    check_square(p, k);
    double out = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        out += p[j] * k(x, j);
    }
    return out;
}

double similarity_profile(std::span<const double> k_values)
{
    if (k_values.empty()) {
        throw std::invalid_argument("similarity profile of an empty sample set");
    }
    return std::accumulate(k_values.begin(), k_values.end(), 0.0) / static_cast<double>(k_values.size());
}

double shannon_entropy(const DiscreteDistribution& p)
{
    double h = 0.0;
    for (double v : p.probs()) {
        if (v > 0.0) {
            h -= v * std::log(v);
        }
    }
    return h;
}

double gait_entropy(const DiscreteDistribution& p, const Tensor& k)
{
    const auto pk = similarity_profile(p, k);
    double h = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            h -= p[i] * std::log(pk[i]);
        }
    }
    return h;
}

void check_tsallis_order(double alpha)
{
    if (!(alpha < 2.0)) {
        throw std::invalid_argument("Tsallis order must be < 2, got " + std::to_string(alpha));
    }
}

double tsallis_entropy(const DiscreteDistribution& p, const Tensor& k, double alpha)
{
    check_tsallis_order(alpha);
    if (alpha == 1.0) {
        return gait_entropy(p, k);
    }
    const auto pk = similarity_profile(p, k);
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            e += p[i] * std::pow(pk[i], alpha - 1.0);
        }
    }
    return (1.0 - e) / (alpha - 1.0);
}

}  // namespace gem::core
