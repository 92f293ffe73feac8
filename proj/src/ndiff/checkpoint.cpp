#include "gem/ndiff/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

namespace gem::ndiff {

namespace {

constexpr std::string_view magic = "GEMNDIFF";

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

void put_f64(std::string& out, double d)
{
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::uint64_t take(int n)
    {
        if (pos_ + static_cast<std::size_t>(n) > bytes_.size()) {
            throw CheckpointError("checkpoint truncated at byte " + std::to_string(pos_));
        }
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
        }
        return v;
    }

    std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)); }
    double f64() { return std::bit_cast<double>(take(8)); }

    std::string_view prefix(std::size_t n)
    {
        if (bytes_.size() < n) {
            throw CheckpointError("checkpoint too short");
        }
        pos_ = n;
        return bytes_.substr(0, n);
    }

    bool at_end() const { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize(const Mlp& net)
{
    std::string out(magic);
    put_u32(out, checkpoint_version);
    put_u32(out, static_cast<std::uint32_t>(net.layers().size()));
    for (const Layer& l : net.layers()) {
        put_u32(out, static_cast<std::uint32_t>(l.in_dim()));
        put_u32(out, static_cast<std::uint32_t>(l.out_dim()));
        out.push_back(static_cast<char>(l.activation));
        for (double w : l.weight.values()) {
            put_f64(out, w);
        }
        for (double b : l.bias.values()) {
            put_f64(out, b);
        }
    }
    return out;
}

Mlp deserialize(std::string_view bytes)
{
    Reader r(bytes);
    if (r.prefix(magic.size()) != magic) {
        throw CheckpointError("not a network checkpoint (bad magic)");
    }
    const std::uint32_t version = r.u32();
    if (version != checkpoint_version) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32();
    std::vector<Layer> layers;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t in = r.u32();
        const std::uint32_t out = r.u32();
        const std::uint8_t act = r.u8();
        if (act > static_cast<std::uint8_t>(Activation::softplus)) {
            throw CheckpointError("layer " + std::to_string(i) + ": bad activation code");
        }
        Layer l;
        l.activation = static_cast<Activation>(act);
        l.weight = Tensor::matrix(out, in);
        for (double& w : l.weight.values()) {
            w = r.f64();
        }
        l.bias = Tensor({out}, 0.0);
        for (double& b : l.bias.values()) {
            b = r.f64();
        }
        layers.push_back(std::move(l));
    }
    if (!r.at_end()) {
        throw CheckpointError("trailing bytes after last layer");
    }
    return Mlp(std::move(layers));
}

void save_checkpoint(const std::filesystem::path& path, const Mlp& net)
{
    const std::string bytes = serialize(net);
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw CheckpointError("cannot open " + tmp + " for writing");
        }
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, path);
}

Mlp load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw CheckpointError("cannot open " + path.string());
    }
    const std::string bytes{std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    return deserialize(bytes);
}

}  // namespace gem::ndiff
