#include "gem/ndiff/finite_diff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gem::ndiff {

Gradients finite_diff_grad(const std::function<double()>& loss, std::span<Tensor* const> params,
                           double eps)
{
    if (!(eps > 0.0)) {
        throw std::invalid_argument("finite_diff_grad: eps must be positive");
    }
    Gradients out;
    for (Tensor* p : params) {
        Tensor g(p->shape(), 0.0);
        for (std::size_t j = 0; j < p->size(); ++j) {
            const double saved = (*p)[j];
            (*p)[j] = saved + eps;
            const double up = loss();
            (*p)[j] = saved - eps;
            const double down = loss();
            (*p)[j] = saved;
            g[j] = (up - down) / (2.0 * eps);
        }
        out.push_back(std::move(g));
    }
    return out;
}

double max_relative_error(std::span<const Tensor> a, std::span<const Tensor> b, double floor)
{
    if (a.size() != b.size()) {
        throw ShapeError("max_relative_error: tensor lists differ in length");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].same_shape(b[i])) {
            throw ShapeError("max_relative_error: shape mismatch at " + std::to_string(i));
        }
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            const double x = a[i][j];
            const double y = b[i][j];
            const double denom = std::max({std::abs(x), std::abs(y), floor});
            worst = std::max(worst, std::abs(x - y) / denom);
        }
    }
    return worst;
}

}  // namespace gem::ndiff
