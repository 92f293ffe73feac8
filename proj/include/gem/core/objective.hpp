#pragma once

#include "gem/core/entropy.hpp"

#include <span>
#include <vector>

namespace gem::core {

/// Exact objective over a discrete distribution:
///   E_p[ln g(x)] - E_{x,x'~p}[k(x,x') g(x)] + 1.
/// Throws if any g is not strictly positive.
double gem_objective(const DiscreteDistribution& p, const Tensor& k, std::span<const double> g);

/// d/dg(x) of gem_objective: p(x) (1/g(x) - p_k(x)).
std::vector<double> gem_objective_gradient(const DiscreteDistribution& p, const Tensor& k,
                                           std::span<const double> g);

/// Pair-function form: E_p[ln h(x,x)] - E_{x,x'~p}[h(x,x')] + 1, with h an n x n matrix.
double gem_objective_pairwise(const DiscreteDistribution& p, const Tensor& h);

/// Sample estimate: mean ln g(x_i) - mean k_j g_j + 1, where the second mean runs over
/// pairs (x_j, x'_j) with g_j = g(x_j) and k_j = k(x_j, x'_j).
double gem_objective_samples(std::span<const double> g_x, std::span<const double> pair_g,
                             std::span<const double> pair_k);

/// Tsallis form, alpha < 2:
///   1/(alpha-1) + (1 - 1/(alpha-1)) E[g^(1-alpha)] - E[k g^(2-alpha)].
/// alpha == 1 evaluates gem_objective.
double tsallis_gem_objective(const DiscreteDistribution& p, const Tensor& k, std::span<const double> g,
                             double alpha);

std::vector<double> tsallis_gem_objective_gradient(const DiscreteDistribution& p, const Tensor& k,
                                                   std::span<const double> g, double alpha);

/// Sample estimate of the Tsallis form (same pair layout as gem_objective_samples).
double tsallis_gem_objective_samples(std::span<const double> g_x, std::span<const double> pair_g,
                                     std::span<const double> pair_k, double alpha);

/// r = ln g(x) - k(x,x') (g(x) + g(x')).
double intrinsic_reward(double g_x, double g_xp, double k);

}  // namespace gem::core
