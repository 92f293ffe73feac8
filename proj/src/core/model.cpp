#include "gem/core/model.hpp"

#include "gem/core/entropy.hpp"

#include <stdexcept>

namespace gem::core {

void ArConfig::validate() const
{
    if (!(q >= 1.0) || !(delta > 0.0) || !(scale >= 0.0)) {
        throw std::invalid_argument("AR config requires q >= 1, delta > 0, C >= 0");
    }
}

GemBatch GemBatch::same(Tensor x)
{
    GemBatch b;
    b.f_input = x;
    b.g_input = std::move(x);
    return b;
}

GemModel::GemModel(Mlp g_net, std::optional<Mlp> f_net, GemHyper hyper)
    : g_net_(std::move(g_net)), f_net_(std::move(f_net)), hyper_(hyper)
{
    if (g_net_.output_dim() != 1) {
        throw ndiff::DimensionError(g_net_.layers().size() - 1, "g network must have a scalar output");
    }
    if (g_net_.layers().back().activation != ndiff::Activation::softplus) {
        throw std::invalid_argument("g network needs a softplus output head");
    }
    if (!(hyper_.c > 0.0) || hyper_.n_neg == 0 || hyper_.w_reg < 0.0) {
        throw std::invalid_argument("GEM hyperparameters require c > 0, n_neg > 0, w_reg >= 0");
    }
    check_tsallis_order(hyper_.alpha);
}

GemModel GemModel::create(std::size_t g_input_dim, const std::vector<std::size_t>& g_hidden,
                          std::size_t f_input_dim, const std::vector<std::size_t>& f_widths, GemHyper hyper,
                          Rng& rng)
{
    std::vector<std::size_t> widths = g_hidden;
    widths.push_back(1);
    Mlp g = Mlp::create(g_input_dim, widths, ndiff::Activation::relu, ndiff::Activation::softplus, rng);
    std::optional<Mlp> f;
    if (!f_widths.empty()) {
        f = Mlp::create(f_input_dim, f_widths, ndiff::Activation::relu, ndiff::Activation::identity, rng);
    }
    return GemModel(std::move(g), std::move(f), hyper);
}

const Mlp& GemModel::f_net() const
{
    if (!f_net_) {
        throw std::logic_error("model uses the identity embedding");
    }
    return *f_net_;
}

Mlp& GemModel::f_net()
{
    if (!f_net_) {
        throw std::logic_error("model uses the identity embedding");
    }
    return *f_net_;
}

std::vector<double> GemModel::g(const Tensor& g_input) const
{
    Tensor out = g_net_.forward(g_input);
    std::vector<double> g(out.values());
    for (double& v : g) {
        v += g_floor;
    }
    return g;
}

Tensor GemModel::embed(const Tensor& f_input) const
{
    return f_net_ ? f_net_->forward(f_input) : f_input;
}

double GemModel::similarity(const Tensor& a, std::size_t i, const Tensor& b, std::size_t j) const
{
    const Tensor ea = embed(gather_rows(a, std::vector<std::size_t>{i}));
    const Tensor eb = embed(gather_rows(b, std::vector<std::size_t>{j}));
    return core::similarity(ea.row(0), eb.row(0), hyper_.c);
}

}  // namespace gem::core
