#include "gem/cli/smoothing.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gem::cli {

std::vector<Bucket> smooth_curve(std::span<const double> steps, std::span<const double> values, std::size_t n_buckets)
{
    if (values.empty() || steps.size() != values.size()) {
        throw std::invalid_argument("smooth_curve needs a non-empty series with one step per value");
    }
    if (n_buckets == 0) {
        throw std::invalid_argument("smooth_curve needs at least one bucket");
    }
    if (values.size() <= n_buckets) {
        std::vector<Bucket> out;
        for (std::size_t i = 0; i < values.size(); ++i) {
            out.push_back({steps[i], values[i], 1});
        }
        return out;
    }
    const auto [lo_it, hi_it] = std::minmax_element(steps.begin(), steps.end());
    const double lo = *lo_it;
    const double width = (*hi_it - lo) / static_cast<double>(n_buckets);
    std::vector<double> sums(n_buckets, 0.0);
    std::vector<std::size_t> counts(n_buckets, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t b = width > 0.0 ? static_cast<std::size_t>((steps[i] - lo) / width) : 0;
        b = std::min(b, n_buckets - 1);
        sums[b] += values[i];
        ++counts[b];
    }
    std::vector<Bucket> out(n_buckets);
    double carry = values.front();
    for (std::size_t b = 0; b < n_buckets; ++b) {
        out[b].center = lo + (static_cast<double>(b) + 0.5) * width;
        out[b].count = counts[b];
        if (counts[b] > 0) {
            carry = sums[b] / static_cast<double>(counts[b]);
        }
        out[b].mean = carry;
    }
    return out;
}

std::vector<Bucket> smooth_curve(std::span<const double> values, std::size_t n_buckets)
{
    std::vector<double> steps(values.size());
    std::iota(steps.begin(), steps.end(), 0.0);
    return smooth_curve(steps, values, n_buckets);
}

}  // namespace gem::cli
