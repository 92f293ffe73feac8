#pragma once

#include "gem/agent/policy.hpp"
#include "gem/agent/rollout.hpp"

#include <span>
#include <vector>

namespace gem::agent {

struct PolicyGradientResult {
    double ploss = 0.0;    // mean -log pi(a_t | x_t) * sg(R_t + V(x_{t+1}) - V(x_t))
    double vloss = 0.0;    // mean (V(x_t) - sg RET(t))^2
    double entropy = 0.0;  // mean action-distribution entropy
    double total = 0.0;    // ploss + vloss - w_ent * entropy
    std::vector<double> returns;     // RET(t) per transition, traces concatenated
    std::vector<double> advantages;  // R_t + V(x_{t+1}) - V(x_t), same layout
    ndiff::Gradients pi_grads;
    ndiff::Gradients v_grads;
};

/// Actor-critic loss over a batch of traces. `rewards[i][t]` is the total reward R_t of step t of
/// trace i. Within a trace of length L:
///   TRACE(t, m) = sum_{j=t}^{t+m} R_j + V(x_{t+m+1}),  m = 0..L-1-t,
///   RET(t) = mean_m TRACE(t, m),
/// with V(x_L) = 0 when the last transition ends the episode. All terms average over every step
/// of every trace.
///
/// `frozen` substitutes stored advantages and returns for the stop-gradient quantities, which
/// turns the loss into a plain function of the parameters (used for finite-difference checks).
struct FrozenTargets {
    std::vector<double> advantages;
    std::vector<double> returns;
};

PolicyGradientResult policy_gradient_loss(const std::vector<Trace>& traces,
                                          const std::vector<std::vector<double>>& rewards,
                                          const PolicyValueNets& nets, bool with_gradients = true,
                                          const FrozenTargets* frozen = nullptr);

}  // namespace gem::agent
