#pragma once

#include "gem/ndiff/mlp.hpp"
#include "gem/random.hpp"

#include <optional>
#include <vector>

namespace gem::core {

using ndiff::Mlp;
using ndiff::Tensor;

/// Offset added to the softplus head so g stays strictly positive.
inline constexpr double g_floor = 1e-8;

struct GemHyper {
    double c = 1.0;           // similarity scale in k = exp(-c ||f(x) - f(x')||)
    std::size_t n_neg = 32;   // negatives per anchor
    double w_reg = 1e-4;      // embedding-norm penalty
    double alpha = 1.0;       // Tsallis order; 1 is the Shannon case

    friend bool operator==(const GemHyper&, const GemHyper&) = default;
};

struct ArConfig {
    double q = 4.0;
    double delta = 1.0;
    double scale = 1.0;  // weight C of the AR term in the embedding loss

    void validate() const;
};

/// Rows of g-inputs and f-inputs describing the same states. They may differ: for example a
/// soft one-hot code for g next to the raw coordinate for a fixed identity embedding.
struct GemBatch {
    Tensor g_input;
    Tensor f_input;

    static GemBatch same(Tensor x);
    std::size_t size() const { return g_input.rows(); }
};

/// The positive function g (softplus head + g_floor) and the embedding f. Without an f network
/// the embedding is the f-input itself.
class GemModel {
public:
    GemModel() = default;
    GemModel(Mlp g_net, std::optional<Mlp> f_net, GemHyper hyper);

    /// g: g_input_dim -> hidden... -> 1 (softplus). f: f_input_dim -> f_widths (relu hidden,
    /// identity output); empty f_widths selects the identity embedding.
    static GemModel create(std::size_t g_input_dim, const std::vector<std::size_t>& g_hidden,
                           std::size_t f_input_dim, const std::vector<std::size_t>& f_widths,
                           GemHyper hyper, Rng& rng);

    const Mlp& g_net() const noexcept { return g_net_; }
    Mlp& g_net() noexcept { return g_net_; }
    bool learned_embedding() const noexcept { return f_net_.has_value(); }
    const Mlp& f_net() const;
    Mlp& f_net();
    const GemHyper& hyper() const noexcept { return hyper_; }
    GemHyper& hyper() noexcept { return hyper_; }

    std::vector<double> g(const Tensor& g_input) const;
    Tensor embed(const Tensor& f_input) const;
    /// k between row i of `a` and row j of `b` (f-inputs).
    double similarity(const Tensor& a, std::size_t i, const Tensor& b, std::size_t j) const;

    friend bool operator==(const GemModel&, const GemModel&) = default;

private:
    Mlp g_net_;
    std::optional<Mlp> f_net_;
    GemHyper hyper_;
};

}  // namespace gem::core
