#pragma once

#include "gem/ndiff/tensor.hpp"
#include "gem/random.hpp"

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace gem::ndiff {

enum class Activation : std::uint8_t { identity = 0, relu = 1, softplus = 2 };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Numerically stable log(1 + exp(z)).
double softplus(double z);
double sigmoid(double z);

struct Layer {
    Tensor weight;  // out x in
    Tensor bias;    // out
    Activation activation = Activation::identity;

    std::size_t in_dim() const { return weight.cols(); }
    std::size_t out_dim() const { return weight.rows(); }
};

/// Raised when an input or gradient does not fit the network; `layer` names the offending layer.
class DimensionError : public std::invalid_argument {
public:
    DimensionError(std::size_t layer, const std::string& what);
    std::size_t layer() const noexcept { return layer_; }

private:
    std::size_t layer_;
};

/// Intermediate values recorded by a forward pass, consumed by `Mlp::backward`.
struct MlpTape {
    std::vector<Tensor> inputs;           // input to each layer
    std::vector<Tensor> pre_activations;  // affine output of each layer
};

/// Gradients with the layout of `Mlp::parameters()`: w0, b0, w1, b1, ...
using Gradients = std::vector<Tensor>;

/// Feed-forward network. Plain value type: copy it to snapshot, compare with ==.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<Layer> layers);

    /// Hidden layers use `hidden`, the last layer uses `output`. Weights are uniform in
    /// +-sqrt(6 / (fan_in + fan_out)), biases zero.
    static Mlp create(std::size_t input_dim, const std::vector<std::size_t>& widths,
                      Activation hidden, Activation output, Rng& rng);

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<Layer>& layers() noexcept { return layers_; }

    /// input: batch x input_dim. Rows are processed independently.
    Tensor forward(const Tensor& input) const;
    Tensor forward(const Tensor& input, MlpTape& tape) const;

    /// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(output); returns d(loss)/d(input).
    Tensor backward(const MlpTape& tape, const Tensor& grad_output, Gradients& grads) const;

    std::vector<Tensor*> parameters();
    std::vector<const Tensor*> parameters() const;
    Gradients zero_gradients() const;
    std::size_t parameter_count() const;

    friend bool operator==(const Mlp& a, const Mlp& b);

private:
    std::vector<Layer> layers_;
};

}  // namespace gem::ndiff
