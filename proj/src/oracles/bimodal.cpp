#include "gem/oracles/bimodal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gem::oracles {

namespace {

double normal_pdf(double z)
{
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double truncated_pdf(double z, double limit)
{
    if (z < -limit || z > limit) {
        return 0.0;
    }
    return normal_pdf(z) / (normal_cdf(limit) - normal_cdf(-limit));
}

}  // namespace

double bimodal_density(const BimodalSpec& spec, double x)
{
    const double z = x / spec.scale - spec.offset;
    const double mix = spec.weight_low * truncated_pdf(z + spec.shift, spec.trunc)
                       + (1.0 - spec.weight_low) * truncated_pdf(z - spec.shift, spec.trunc);
    return mix / spec.scale;
}

double truncated_normal(double limit, Rng& rng)
{
    while (true) {
        const double z = standard_normal(rng);
        if (z >= -limit && z <= limit) {
            return z;
        }
    }
}

double bimodal_sample(const BimodalSpec& spec, Rng& rng)
{
    const double u = uniform01(rng);
    const double n = truncated_normal(spec.trunc, rng);
    const double component = u < spec.weight_low ? n - spec.shift : n + spec.shift;
    return spec.scale * (component + spec.offset);
}

std::vector<double> bimodal_points(const BimodalSpec& spec)
{
    if (spec.n_points < 2) {
        throw std::invalid_argument("discretised bimodal needs at least two points");
    }
    std::vector<double> pts(spec.n_points);
    const double lo = spec.support_lo();
    const double hi = spec.support_hi();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(pts.size() - 1);
    }
    return pts;
}

core::DiscreteDistribution bimodal_discretized(const BimodalSpec& spec)
{
    const auto pts = bimodal_points(spec);
    std::vector<double> w(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        w[i] = bimodal_density(spec, pts[i]);
    }
    return core::DiscreteDistribution::from_weights(w);
}

std::vector<double> simpson_weights(double lo, double hi, std::size_t nodes)
{
    if (nodes < 3 || nodes % 2 == 0) {
        throw std::invalid_argument("Simpson rule needs an odd node count >= 3");
    }
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    std::vector<double> w(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double c = (i == 0 || i + 1 == nodes) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[i] = c * h / 3.0;
    }
    return w;
}

double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t nodes)
{
    const auto w = simpson_weights(lo, hi, nodes);
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        total += w[i] * f(lo + h * static_cast<double>(i));
    }
    return total;
}

}  // namespace gem::oracles
