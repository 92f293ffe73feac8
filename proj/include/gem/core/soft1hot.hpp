#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gem::core {

/// Soft one-hot encoding of a scalar over `n_bucket` buckets spanning [m_min, m_max].
/// Component i is exp(-|(i + 0.5) - n_bucket * y|) with y = (x - m_min) / (m_max - m_min),
/// so a value at the centre of bucket i yields exactly 1 at index i.
std::vector<double> soft1hot(double x, std::size_t n_bucket, double m_min, double m_max);

/// Same encoding written into `out` (size n_bucket).
void soft1hot_into(double x, double m_min, double m_max, std::span<double> out);

}  // namespace gem::core
