#include "gem/oracles/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gem::oracles {

VisitationTracker::VisitationTracker(std::size_t size, double decay) : counts_(size, 0.0), decay_(decay)
{
    if (size == 0) {
        throw std::invalid_argument("tracker needs a non-empty index space");
    }
    if (!(decay > 0.0 && decay <= 1.0)) {
        throw std::invalid_argument("tracker decay must lie in (0, 1]");
    }
}

void VisitationTracker::record(std::span<const std::size_t> visits)
{
    for (double& c : counts_) {
        c *= decay_;
    }
    for (std::size_t v : visits) {
        if (v >= counts_.size()) {
            throw std::out_of_range("visit index " + std::to_string(v) + " outside tracker");
        }
        counts_[v] += 1.0;
    }
}

bool VisitationTracker::empty() const
{
    return std::all_of(counts_.begin(), counts_.end(), [](double c) { return c <= 0.0; });
}

double VisitationTracker::entropy() const
{
    double total = 0.0;
    for (double c : counts_) {
        total += c;
    }
    if (total <= 0.0) {
        return 0.0;
    }
    double h = 0.0;
    for (double c : counts_) {
        if (c > 0.0) {
            const double p = c / total;
            h -= p * std::log(p);
        }
    }
    return h;
}

std::vector<double> VisitationTracker::heatmap() const
{
    const double mx = *std::max_element(counts_.begin(), counts_.end());
    std::vector<double> out(counts_.size(), 0.0);
    if (mx <= 0.0) {
        return out;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = counts_[i] / mx;
    }
    return out;
}

TrackResult track_and_entropy(VisitationTracker& tracker, std::span<const std::size_t> visits)
{
    tracker.record(visits);
    return {tracker.entropy(), tracker.heatmap(), tracker.empty()};
}

}  // namespace gem::oracles
