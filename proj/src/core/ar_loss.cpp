#include "gem/core/ar_loss.hpp"

#include <cmath>
#include <stdexcept>

namespace gem::core {

namespace {

void check_pairs(const Tensor& a, const Tensor& b)
{
    if (a.rank() != 2 || !a.same_shape(b)) {
        throw ndiff::ShapeError("AR inputs must be matching matrices, got " + a.shape_string() + " and "
                                + b.shape_string());
    }
    if (a.rows() == 0) {
        throw std::invalid_argument("AR loss needs at least one transition");
    }
}

double distance(const Tensor& a, const Tensor& b, std::size_t r)
{
    double sq = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const double d = a(r, c) - b(r, c);
        sq += d * d;
    }
    return std::sqrt(sq);
}

}  // namespace

double ar_loss_value(const Tensor& f_from, const Tensor& f_to, double q, double delta)
{
    check_pairs(f_from, f_to);
    const double dq = std::pow(delta, q);
    double total = 0.0;
    for (std::size_t r = 0; r < f_from.rows(); ++r) {
        total += std::pow(dq + std::pow(distance(f_from, f_to, r), q), 1.0 / q);
    }
    return total / static_cast<double>(f_from.rows());
}

ArResult ar_loss(const GemModel& model, const Tensor& from, const Tensor& to, const ArConfig& cfg,
                 bool with_gradients)
{
    check_pairs(from, to);
    ArResult out;
    if (!model.learned_embedding() || !with_gradients) {
        out.value = ar_loss_value(model.embed(from), model.embed(to), cfg.q, cfg.delta);
        return out;
    }
    const auto& f = model.f_net();
    ndiff::MlpTape tape_a;
    ndiff::MlpTape tape_b;
    const Tensor fa = f.forward(from, tape_a);
    const Tensor fb = f.forward(to, tape_b);
    const std::size_t n = fa.rows();
    const double dq = std::pow(cfg.delta, cfg.q);
    Tensor ga = Tensor::matrix(n, fa.cols());
    Tensor gb = Tensor::matrix(n, fa.cols());
    for (std::size_t r = 0; r < n; ++r) {
        const double d = distance(fa, fb, r);
        const double inner = dq + std::pow(d, cfg.q);
        out.value += std::pow(inner, 1.0 / cfg.q);
        if (d == 0.0) {
            continue;
        }
        // d/dd (dq + d^q)^(1/q) = d^(q-1) (dq + d^q)^(1/q - 1)
        const double dterm = std::pow(d, cfg.q - 1.0) * std::pow(inner, 1.0 / cfg.q - 1.0);
        const double coeff = dterm / (d * static_cast<double>(n));
        for (std::size_t c = 0; c < fa.cols(); ++c) {
            const double u = coeff * (fa(r, c) - fb(r, c));
            ga(r, c) = u;
            gb(r, c) = -u;
        }
    }
    out.value /= static_cast<double>(n);
    out.f_grads = f.zero_gradients();
    f.backward(tape_a, ga, out.f_grads);
    f.backward(tape_b, gb, out.f_grads);
    return out;
}

}  // namespace gem::core
