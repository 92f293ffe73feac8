#pragma once

#include "gem/ndiff/tensor.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gem::core {

using ndiff::Tensor;

class DistributionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Probability vector over a finite support. Sums to 1 within 1e-12.
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    explicit DiscreteDistribution(std::vector<double> probs, std::vector<std::string> labels = {});

    /// Normalises non-negative weights (at least one positive).
    static DiscreteDistribution from_weights(std::span<const double> weights);
    static DiscreteDistribution uniform(std::size_t n);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::vector<double> probs_;
    std::vector<std::string> labels_;
};

/// k(x, x') = exp(-c * ||a - b||_2).
double similarity(std::span<const double> a, std::span<const double> b, double c);

/// n x n similarity matrices used by the exact paths.
Tensor indicator_similarity(std::size_t n);
Tensor constant_similarity(std::size_t n, double value);
/// exp(-(x_i - x_j)^2 / (2 bandwidth^2)) over the given 1-D points.
Tensor gaussian_similarity(std::span<const double> points, double bandwidth);

/// Exact profile p_k(x) = sum_x' p(x') k(x, x') for every support point.
std::vector<double> similarity_profile(const DiscreteDistribution& p, const Tensor& k);
/// Profile of a single support point.
double similarity_profile(const DiscreteDistribution& p, const Tensor& k, std::size_t x);
/// Sample estimate: mean of k(x, x'_j) over draws x'_j.
double similarity_profile(std::span<const double> k_values);

double shannon_entropy(const DiscreteDistribution& p);
/// H_k(p) = -E[ln p_k(x)].
double gait_entropy(const DiscreteDistribution& p, const Tensor& k);
/// H_{alpha,k}(p) = (1 - E[p_k^(alpha-1)]) / (alpha - 1); alpha == 1 gives gait_entropy.
double tsallis_entropy(const DiscreteDistribution& p, const Tensor& k, double alpha);

/// Throws unless alpha < 2.
void check_tsallis_order(double alpha);

}  // namespace gem::core
