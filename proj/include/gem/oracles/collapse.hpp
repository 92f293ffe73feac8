#pragma once

#include "gem/core/model.hpp"
#include "gem/oracles/bimodal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gem::oracles {

struct CollapseVariant {
    bool discrete = false;
    bool learned_similarity = false;

    std::string name() const;
    static std::vector<CollapseVariant> all();
};

struct CollapseSettings {
    std::size_t batch_size = 256;
    std::size_t n_neg = 8;
    double w_reg = 1e-6;
    std::size_t steps = 1000;
    double learning_rate = 1e-3;
    double beta1 = 0.0;
    double beta2 = 0.95;
    std::size_t hidden = 128;
    std::size_t embed_dim = 64;
    std::size_t n_bucket = 30;
    double c_fixed = 2.0;    // k = exp(-c_fixed |x - x'|) on raw coordinates
    double c_learned = 1.0;
    std::size_t quadrature_nodes = 3001;
    std::uint64_t seed = 0;
};

struct CollapseReport {
    CollapseVariant variant;
    std::size_t steps = 0;
    bool untrained = true;
    /// Evaluation points: the support points (discrete) or the quadrature nodes (continuous).
    std::vector<double> x;
    std::vector<double> truth;      // probabilities or density values
    std::vector<double> implied;    // normalised 1/g
    /// Target for the fixed similarity: the normalised similarity profile of the truth
    /// (the maximiser 1/g* = p_k). Equal to `truth` for learned-similarity variants.
    std::vector<double> reference;
    double error = 0.0;             // TV (discrete) or L1 (continuous) of implied vs reference
    double error_vs_truth = 0.0;    // same metric against the truth itself
    double truth_entropy = 0.0;     // Shannon (discrete) or differential (continuous)
    double implied_entropy = 0.0;
};

/// Trains g (and f for the learned similarity) on bimodal samples and reports the implied
/// distributions.
CollapseReport run_collapse_variant(const BimodalSpec& spec, const CollapseVariant& variant,
                                    const CollapseSettings& settings);

std::vector<CollapseReport> collapse_harness(const BimodalSpec& spec, const std::vector<CollapseVariant>& variants,
                                             const CollapseSettings& settings);

}  // namespace gem::oracles
