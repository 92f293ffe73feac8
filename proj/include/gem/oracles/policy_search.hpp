#pragma once

#include "gem/oracles/tabular_mdp.hpp"

#include <cstdint>

namespace gem::oracles {

struct PolicySearchOptions {
    double grid_step = 0.1;                 // simplex grid resolution per policy row
    std::size_t max_grid_policies = 200000;  // enumerate the grid only below this count
    std::size_t max_table_entries = 4096;    // hard bound on N * A * (T - 1)
    std::size_t restarts = 4;                // random starts for the continuous search
    std::size_t frank_wolfe_iterations = 400;
    std::size_t ascent_iterations = 400;
    std::uint64_t seed = 0;
};

struct PolicySearchResult {
    double entropy = 0.0;
    TabularPolicy policy;
    /// Frank-Wolfe duality gap at the returned point (an upper bound on the remaining
    /// improvement when H_k is concave over visitation distributions).
    double gap = 0.0;
    std::size_t grid_policies = 0;  // 0 when the grid was too large to enumerate
};

class SearchBoundExceeded : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Best H_k(p^pi) over time-dependent tabular policies. Combines a simplex-grid sweep (when
/// small enough), Frank-Wolfe over visitation distributions with a dynamic-programming linear
/// oracle, and projected gradient ascent on the policy table.
PolicySearchResult max_entropy_policy_search(const TabularMdp& mdp, const Tensor& k,
                                             const PolicySearchOptions& options = {});

/// H_k of the exact visitation of `policy`.
double visitation_entropy(const TabularMdp& mdp, const TabularPolicy& policy, const Tensor& k);

/// Gradient of H_k(p^pi) with respect to each policy entry pi_t(a | s).
std::vector<double> visitation_entropy_gradient(const TabularMdp& mdp, const TabularPolicy& policy,
                                                const Tensor& k);

/// Euclidean projection onto the probability simplex (in place).
void project_to_simplex(std::span<double> v);

}  // namespace gem::oracles
