#pragma once

#include "gem/ndiff/mlp.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace gem::ndiff {

// Layout (all integers and floats little-endian):
//   "GEMNDIFF"            8-byte magic
//   u32 version           currently 1
//   u32 layer_count
//   per layer: u32 in_dim, u32 out_dim, u8 activation,
//              out_dim*in_dim f64 weights (row-major), out_dim f64 biases

inline constexpr std::uint32_t checkpoint_version = 1;

std::string serialize(const Mlp& net);
Mlp deserialize(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Mlp& net);
Mlp load_checkpoint(const std::filesystem::path& path);

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gem::ndiff
