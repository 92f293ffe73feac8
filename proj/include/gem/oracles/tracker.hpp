#pragma once

#include <span>
#include <vector>

namespace gem::oracles {

/// Exponentially decayed visit counts over a fixed index space.
class VisitationTracker {
public:
    explicit VisitationTracker(std::size_t size, double decay = 0.99);

    /// counts <- decay * counts, then +1 for every entry of `visits`.
    void record(std::span<const std::size_t> visits);

    const std::vector<double>& counts() const noexcept { return counts_; }
    std::size_t size() const noexcept { return counts_.size(); }
    double decay() const noexcept { return decay_; }
    bool empty() const;

    /// Shannon entropy of the normalised counts (0 when empty).
    double entropy() const;
    /// Counts divided by the largest count (all zeros when empty).
    std::vector<double> heatmap() const;

private:
    std::vector<double> counts_;
    double decay_;
};

struct TrackResult {
    double entropy = 0.0;
    std::vector<double> heatmap;
    bool empty = true;
};

TrackResult track_and_entropy(VisitationTracker& tracker, std::span<const std::size_t> visits);

}  // namespace gem::oracles
