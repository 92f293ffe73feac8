#pragma once

#include "gem/core/entropy.hpp"
#include "gem/random.hpp"

#include <functional>
#include <vector>

namespace gem::oracles {

/// X = scale * (I(U < w) (N - shift) + I(U >= w) (N' + shift) + offset), N, N' standard
/// normals truncated to [-trunc, trunc]. Defaults put the support on [0, 30].
struct BimodalSpec {
    double weight_low = 0.3;
    double shift = 2.0;
    double trunc = 2.0;
    double scale = 30.0 / 8.0;
    double offset = 4.0;
    std::size_t n_points = 30;  // discretised variant: equally spaced points on the support

    double support_lo() const { return scale * (offset - shift - trunc); }
    double support_hi() const { return scale * (offset + shift + trunc); }
};

double bimodal_density(const BimodalSpec& spec, double x);
double bimodal_sample(const BimodalSpec& spec, Rng& rng);

/// Standard normal truncated to [-limit, limit] by rejection.
double truncated_normal(double limit, Rng& rng);

/// Points of the discretised variant and their normalised density values.
std::vector<double> bimodal_points(const BimodalSpec& spec);
core::DiscreteDistribution bimodal_discretized(const BimodalSpec& spec);

/// Composite Simpson rule on `nodes` (odd, >= 3) equally spaced nodes over [lo, hi].
double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t nodes = 3001);

/// Simpson weights matching simpson() for sampled values.
std::vector<double> simpson_weights(double lo, double hi, std::size_t nodes);

}  // namespace gem::oracles
