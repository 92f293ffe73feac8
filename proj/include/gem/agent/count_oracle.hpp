#pragma once

#include <span>
#include <vector>

namespace gem::agent {

/// Privileged count baseline: decayed visit counts over true state indices, reward -ln count,
/// and a policy update only every `period` calls.
class CountOracle {
public:
    CountOracle(std::size_t states, double decay = 0.99, std::size_t period = 1);

    /// counts <- decay * counts, then +1 per visit. Counts one call towards the schedule.
    void record(std::span<const std::size_t> visits);
    /// record() followed by the reward of every visit.
    std::vector<double> step(std::span<const std::size_t> visits);

    /// -ln count(s) (count floored at 1e-12).
    double reward(std::size_t s) const;
    /// True on every period-th call of record().
    bool policy_update_due() const noexcept { return calls_ > 0 && calls_ % period_ == 0; }

    const std::vector<double>& counts() const noexcept { return counts_; }
    std::size_t period() const noexcept { return period_; }
    std::size_t calls() const noexcept { return calls_; }

private:
    std::vector<double> counts_;
    double decay_;
    std::size_t period_;
    std::size_t calls_ = 0;
};

}  // namespace gem::agent
