#include "gem/ndiff/mlp.hpp"

#include <Eigen/Core>

#include <cmath>
#include <string>

namespace gem::ndiff {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::RowVectorXd>;
using VectorMap = Eigen::Map<Eigen::RowVectorXd>;

ConstMatrixMap as_matrix(const Tensor& t)
{
    return ConstMatrixMap(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                          static_cast<Eigen::Index>(t.cols()));
}

MatrixMap as_matrix(Tensor& t)
{
    return MatrixMap(t.data().data(), static_cast<Eigen::Index>(t.rows()),
                     static_cast<Eigen::Index>(t.cols()));
}

double activate(Activation a, double z)
{
    switch (a) {
    case Activation::relu:
        return z > 0.0 ? z : 0.0;
    case Activation::softplus:
        return softplus(z);
    case Activation::identity:
        break;
    }
    return z;
}

double activation_derivative(Activation a, double z)
{
    switch (a) {
    case Activation::relu:
        return z > 0.0 ? 1.0 : 0.0;
    case Activation::softplus:
        return sigmoid(z);
    case Activation::identity:
        break;
    }
    return 1.0;
}

}  // namespace

std::string_view to_string(Activation a)
{
    switch (a) {
    case Activation::relu:
        return "relu";
    case Activation::softplus:
        return "softplus";
    case Activation::identity:
        break;
    }
    return "identity";
}

Activation activation_from_string(std::string_view name)
{
    if (name == "relu") {
        return Activation::relu;
    }
    if (name == "softplus") {
        return Activation::softplus;
    }
    if (name == "identity") {
        return Activation::identity;
    }
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

double softplus(double z)
{
    return (z > 0.0 ? z : 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

DimensionError::DimensionError(std::size_t layer, const std::string& what)
    : std::invalid_argument("layer " + std::to_string(layer) + ": " + what), layer_(layer)
{
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers))
{
    if (layers_.empty()) {
        throw std::invalid_argument("Mlp needs at least one layer");
    }
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& l = layers_[i];
        if (l.weight.rank() != 2 || l.bias.rank() != 1 || l.bias.size() != l.weight.rows()) {
            throw DimensionError(i, "weight " + l.weight.shape_string() + " and bias "
                                        + l.bias.shape_string() + " disagree");
        }
        if (i > 0 && layers_[i - 1].out_dim() != l.in_dim()) {
            throw DimensionError(i, "expects input width " + std::to_string(l.in_dim())
                                        + " but previous layer emits "
                                        + std::to_string(layers_[i - 1].out_dim()));
        }
    }
}

Mlp Mlp::create(std::size_t input_dim, const std::vector<std::size_t>& widths, Activation hidden,
                Activation output, Rng& rng)
{
    std::vector<Layer> layers;
    std::size_t fan_in = input_dim;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const std::size_t fan_out = widths[i];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Layer layer;
        layer.weight = Tensor::matrix(fan_out, fan_in);
        for (double& w : layer.weight.values()) {
            w = uniform(rng, -limit, limit);
        }
        layer.bias = Tensor({fan_out}, 0.0);
        layer.activation = (i + 1 == widths.size()) ? output : hidden;
        layers.push_back(std::move(layer));
        fan_in = fan_out;
    }
    return Mlp(std::move(layers));
}

std::size_t Mlp::input_dim() const
{
    return layers_.front().in_dim();
}

std::size_t Mlp::output_dim() const
{
    return layers_.back().out_dim();
}

Tensor Mlp::forward(const Tensor& input) const
{
    MlpTape unused;
    return forward(input, unused);
}

Tensor Mlp::forward(const Tensor& input, MlpTape& tape) const
{
    if (input.rank() != 2) {
        throw DimensionError(0, "input must be batch x features, got " + input.shape_string());
    }
    tape.inputs.clear();
    tape.pre_activations.clear();
    Tensor current = input;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const Layer& l = layers_[i];
        if (current.cols() != l.in_dim()) {
            throw DimensionError(i, "expects input width " + std::to_string(l.in_dim()) + ", got "
                                        + std::to_string(current.cols()));
        }
        Tensor z = Tensor::matrix(current.rows(), l.out_dim());
        auto zm = as_matrix(z);
        zm.noalias() = as_matrix(current) * as_matrix(l.weight).transpose();
        zm.rowwise() += ConstVectorMap(l.bias.data().data(), static_cast<Eigen::Index>(l.out_dim()));
        Tensor a = z;
        if (l.activation != Activation::identity) {
            for (double& v : a.values()) {
                v = activate(l.activation, v);
            }
        }
        tape.inputs.push_back(std::move(current));
        tape.pre_activations.push_back(std::move(z));
        current = std::move(a);
    }
    return current;
}

Tensor Mlp::backward(const MlpTape& tape, const Tensor& grad_output, Gradients& grads) const
{
    if (tape.inputs.size() != layers_.size()) {
        throw DimensionError(0, "tape does not belong to this network");
    }
    if (grads.size() != 2 * layers_.size()) {
        throw DimensionError(0, "gradient buffer has wrong layout");
    }
    const std::size_t last = layers_.size() - 1;
    if (grad_output.rank() != 2 || !grad_output.same_shape(tape.pre_activations[last])) {
        throw DimensionError(last, "output gradient " + grad_output.shape_string()
                                       + " does not match output "
                                       + tape.pre_activations[last].shape_string());
    }
    Tensor delta = grad_output;
    for (std::size_t k = layers_.size(); k-- > 0;) {
        const Layer& l = layers_[k];
        const Tensor& z = tape.pre_activations[k];
        if (l.activation != Activation::identity) {
            for (std::size_t j = 0; j < delta.size(); ++j) {
                delta[j] *= activation_derivative(l.activation, z[j]);
            }
        }
        const auto dz = as_matrix(delta);
        as_matrix(grads[2 * k]).noalias() += dz.transpose() * as_matrix(tape.inputs[k]);
        VectorMap(grads[2 * k + 1].data().data(), static_cast<Eigen::Index>(l.out_dim()))
            += dz.colwise().sum();
        Tensor next = Tensor::matrix(delta.rows(), l.in_dim());
        as_matrix(next).noalias() = dz * as_matrix(l.weight);
        delta = std::move(next);
    }
    return delta;
}

std::vector<Tensor*> Mlp::parameters()
{
    std::vector<Tensor*> out;
    for (Layer& l : layers_) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

std::vector<const Tensor*> Mlp::parameters() const
{
    std::vector<const Tensor*> out;
    for (const Layer& l : layers_) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

Gradients Mlp::zero_gradients() const
{
    Gradients g;
    for (const Layer& l : layers_) {
        g.emplace_back(l.weight.shape(), 0.0);
        g.emplace_back(l.bias.shape(), 0.0);
    }
    return g;
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (const Layer& l : layers_) {
        n += l.weight.size() + l.bias.size();
    }
    return n;
}

bool operator==(const Mlp& a, const Mlp& b)
{
    if (a.layers_.size() != b.layers_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.layers_.size(); ++i) {
        const Layer& x = a.layers_[i];
        const Layer& y = b.layers_[i];
        if (x.activation != y.activation || !(x.weight == y.weight) || !(x.bias == y.bias)) {
            return false;
        }
    }
    return true;
}

}  // namespace gem::ndiff
