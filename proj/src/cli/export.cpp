#include "gem/cli/export.hpp"

#include "gem/cli/config.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gem::cli {

std::string header_comment(const OutputHeader& header)
{
    std::ostringstream out;
    out << "# tool gem " << tool_version << "\n"
        << "# config_hash " << header.config_hash << "\n"
        << "# seed " << header.seed << "\n";
    if (!header.kind.empty()) {
        out << "# kind " << header.kind << "\n";
    }
    return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.flush();
        if (!out) {
            throw std::runtime_error("failed to write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string heatmap_pgm(std::span<const double> open_cell_values, const envs::Layout& layout,
                        const OutputHeader& header)
{
    const auto& open = layout.open_cells();
    if (open_cell_values.size() != open.size()) {
        throw std::invalid_argument("heatmap needs one value per open cell");
    }
    std::vector<int> pixels(static_cast<std::size_t>(layout.width() * layout.height()), 0);
    for (std::size_t i = 0; i < open.size(); ++i) {
        const double v = std::clamp(open_cell_values[i], 0.0, 1.0);
        pixels[static_cast<std::size_t>(open[i].row * layout.width() + open[i].col)] =
            static_cast<int>(std::lround(255.0 * v));
    }
    std::ostringstream out;
    out << "P2\n" << header_comment(header) << layout.width() << " " << layout.height() << "\n255\n";
    for (int r = 0; r < layout.height(); ++r) {
        for (int c = 0; c < layout.width(); ++c) {
            out << (c ? " " : "") << pixels[static_cast<std::size_t>(r * layout.width() + c)];
        }
        out << "\n";
    }
    return out.str();
}

std::vector<std::array<double, 2>> pca_2d(const std::vector<std::vector<double>>& points)
{
    if (std::set<std::vector<double>>(points.begin(), points.end()).size() < 2) {
        throw EmbeddingError("PCA needs at least two distinct points");
    }
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto d = static_cast<Eigen::Index>(points.front().size());
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(points[static_cast<std::size_t>(i)].size()) != d) {
            throw EmbeddingError("embedding points differ in dimension");
        }
        for (Eigen::Index j = 0; j < d; ++j) {
            x(i, j) = points[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    x.rowwise() -= x.colwise().mean();
    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    // Eigenvalues come in increasing order.
    Eigen::MatrixXd axes(d, 2);
    axes.setZero();
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(2, d); ++k) {
        Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - k);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        axes.col(k) = v;
    }
    const Eigen::MatrixXd proj = x * axes;
    std::vector<std::array<double, 2>> out(points.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = {proj(i, 0), proj(i, 1)};
    }
    return out;
}

std::string embeddings_csv(const core::GemModel& model, const envs::GridWorld& world, envs::EncodingMode mode,
                           const OutputHeader& header)
{
    const auto states = world.reachable_states();
    const std::size_t dim = world.observation_dim(mode);
    ndiff::Tensor input = ndiff::Tensor::matrix(states.size(), dim);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto obs = world.encode(states[i], mode);
        std::copy(obs.begin(), obs.end(), input.row(i).begin());
    }
    const ndiff::Tensor emb = model.embed(input);
    std::vector<std::vector<double>> points(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto row = emb.row(i);
        points[i].assign(row.begin(), row.end());
    }
    const auto proj = pca_2d(points);

    auto bits = [](const std::vector<std::uint8_t>& v) {
        std::string s;
        for (auto b : v) {
            s += b ? '1' : '0';
        }
        return s.empty() ? std::string("-") : s;
    };
    std::ostringstream out;
    out.precision(9);
    out << header_comment(header) << "state,row,col,goal,keys,doors,pc1,pc2\n";
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto& s = states[i];
        out << world.true_state_index(s) << "," << s.agent.row << "," << s.agent.col << "," << s.goal << ","
            << bits(s.keys) << "," << bits(s.doors) << "," << proj[i][0] << "," << proj[i][1] << "\n";
    }
    return out.str();
}

}  // namespace gem::cli
