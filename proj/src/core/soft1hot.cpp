#include "gem/core/soft1hot.hpp"

#include <cmath>
#include <stdexcept>

namespace gem::core {

void soft1hot_into(double x, double m_min, double m_max, std::span<double> out)
{
    if (!(m_max > m_min)) {
        throw std::invalid_argument("soft1hot requires m_max > m_min");
    }
    const double n = static_cast<double>(out.size());
    const double y = n * (x - m_min) / (m_max - m_min);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::exp(-std::abs(static_cast<double>(i) + 0.5 - y));
    }
}

std::vector<double> soft1hot(double x, std::size_t n_bucket, double m_min, double m_max)
{
    std::vector<double> out(n_bucket);
    soft1hot_into(x, m_min, m_max, out);
    return out;
}

}  // namespace gem::core
