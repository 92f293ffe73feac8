#pragma once

#include "gem/core/model.hpp"
#include "gem/envs/grid_world.hpp"
#include "gem/envs/layout.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gem::cli {

/// Metadata written as comment lines at the top of every output file.
struct OutputHeader {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string kind;  // free-form description, e.g. "metrics"
};

/// "# key value" lines: tool version, config hash, seed, kind.
std::string header_comment(const OutputHeader& header);

/// Writes via a temporary sibling file and rename, so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Plain-text graymap ("P2") of per-open-cell values in [0, 1] laid over the grid; walls are 0.
/// Values are scaled to 0..255 and rounded.
std::string heatmap_pgm(std::span<const double> open_cell_values, const envs::Layout& layout,
                        const OutputHeader& header);

class EmbeddingError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Projection of row vectors onto the top-2 principal axes of their centred covariance. Each axis
/// is signed so that its largest-magnitude coordinate is positive. Needs at least two distinct rows.
std::vector<std::array<double, 2>> pca_2d(const std::vector<std::vector<double>>& points);

/// Embeds every reachable grid state with f and writes a CSV of its 2-D principal projection.
std::string embeddings_csv(const core::GemModel& model, const envs::GridWorld& world, envs::EncodingMode mode,
                           const OutputHeader& header);

}  // namespace gem::cli
