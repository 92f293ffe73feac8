#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gem::cli {

struct Bucket {
    double center = 0.0;  // midpoint of the bucket on the step axis
    double mean = 0.0;
    std::size_t count = 0;
};

/// Splits [min step, max step] into `n_buckets` equal-width intervals and averages the values
/// falling in each. Empty buckets carry the previous bucket's mean with count 0. With no more
/// points than buckets, every point becomes its own bucket.
std::vector<Bucket> smooth_curve(std::span<const double> steps, std::span<const double> values,
                                 std::size_t n_buckets = 20);
/// Steps default to 0, 1, 2, ...
std::vector<Bucket> smooth_curve(std::span<const double> values, std::size_t n_buckets = 20);

}  // namespace gem::cli
