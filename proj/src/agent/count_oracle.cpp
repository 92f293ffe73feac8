#include "gem/agent/count_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gem::agent {

CountOracle::CountOracle(std::size_t states, double decay, std::size_t period)
    : counts_(states, 0.0), decay_(decay), period_(period)
{
    if (states == 0 || period == 0 || !(decay > 0.0 && decay <= 1.0)) {
        throw std::invalid_argument("count oracle needs states, a positive period and decay in (0, 1]");
    }
}

void CountOracle::record(std::span<const std::size_t> visits)
{
    for (double& c : counts_) {
        c *= decay_;
    }
    for (std::size_t s : visits) {
        if (s >= counts_.size()) {
            throw std::out_of_range("count oracle visit outside the state space");
        }
        counts_[s] += 1.0;
    }
    ++calls_;
}

std::vector<double> CountOracle::step(std::span<const std::size_t> visits)
{
    record(visits);
    std::vector<double> out(visits.size());
    for (std::size_t i = 0; i < visits.size(); ++i) {
        out[i] = reward(visits[i]);
    }
    return out;
}

double CountOracle::reward(std::size_t s) const
{
    return -std::log(std::max(counts_.at(s), 1e-12));
}

}  // namespace gem::agent
