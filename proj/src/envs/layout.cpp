#include "gem/envs/layout.hpp"

#include <fstream>
#include <sstream>

namespace gem::envs {

namespace {

constexpr std::string_view two_rooms = R"(#######
#BB...#
#B....#
#.....#
#.....#
#.....#
#####.#
#.....#
#.....#
#.....#
#G....#
#GG...#
#######
)";

constexpr std::string_view sixteen_leaves = R"(###############
#G###G###G###G#
#.###.###.###.#
#.###.###.###.#
#.....###.....#
#.#.#.###.#.#.#
#.#.#.###.#.#.#
#G#.#G###G#.#G#
###.#######.###
###....B....###
###.#######.###
#G#.#G###G#.#G#
#.#.#.###.#.#.#
#.#.#.###.#.#.#
#.....###.....#
#.###.###.###.#
#.###.###.###.#
#G###G###G###G#
###############
)";

constexpr std::string_view two_keys = R"(#######
#B...K#
#.....#
#BB...#
#K....#
###D###
#.....#
#..G..#
#######
)";

bool known_cell(char c)
{
    switch (c) {
    case '#':
    case '.':
    case 'B':
    case 'G':
    case 'K':
    case 'D':
        return true;
    default:
        return false;
    }
}

}  // namespace

std::vector<std::string> builtin_layout_names()
{
    return {"2-rooms", "16-leaves", "2-keys"};
}

std::string_view builtin_layout_text(std::string_view name)
{
    if (name == "2-rooms") {
        return two_rooms;
    }
    if (name == "16-leaves") {
        return sixteen_leaves;
    }
    if (name == "2-keys") {
        return two_keys;
    }
    throw LayoutError("no built-in layout named '" + std::string(name) + "'");
}

Layout Layout::parse(std::string_view text)
{
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    if (lines.empty()) {
        throw LayoutError("layout is empty");
    }
    Layout l;
    l.height_ = static_cast<int>(lines.size());
    l.width_ = static_cast<int>(lines.front().size());
    l.open_index_.assign(static_cast<std::size_t>(l.height_ * l.width_), -1);
    for (int r = 0; r < l.height_; ++r) {
        const std::string& line = lines[static_cast<std::size_t>(r)];
        if (static_cast<int>(line.size()) != l.width_) {
            throw LayoutError("layout row " + std::to_string(r) + " has width "
                              + std::to_string(line.size()) + ", expected "
                              + std::to_string(l.width_));
        }
        for (int c = 0; c < l.width_; ++c) {
            const char ch = line[static_cast<std::size_t>(c)];
            if (!known_cell(ch)) {
                throw LayoutError(std::string("unknown cell character '") + ch + "' at row "
                                  + std::to_string(r) + ", col " + std::to_string(c));
            }
            const auto cell = static_cast<Cell>(ch);
            l.cells_.push_back(cell);
            const Position p{r, c};
            if (cell != Cell::wall) {
                l.open_index_[static_cast<std::size_t>(r * l.width_ + c)]
                    = static_cast<int>(l.open_.size());
                l.open_.push_back(p);
            }
            switch (cell) {
            case Cell::spawn:
                l.spawns_.push_back(p);
                break;
            case Cell::goal:
                l.goals_.push_back(p);
                break;
            case Cell::key:
                l.keys_.push_back(p);
                break;
            case Cell::door:
                l.doors_.push_back(p);
                break;
            default:
                break;
            }
        }
    }
    if (l.spawns_.empty()) {
        throw LayoutError("layout has no spawn cell ('B')");
    }
    if (l.goals_.empty()) {
        throw LayoutError("layout has no goal cell ('G')");
    }
    if (l.keys_.size() > 16 || l.doors_.size() > 16) {
        throw LayoutError("at most 16 keys and 16 doors are supported");
    }
    return l;
}

Layout Layout::load(const std::filesystem::path& path)
{
    std::ifstream f(path);
    if (!f) {
        throw LayoutError("cannot open layout file " + path.string());
    }
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

Layout Layout::named(std::string_view name_or_path)
{
    for (const auto& n : builtin_layout_names()) {
        if (n == name_or_path) {
            return parse(builtin_layout_text(n));
        }
    }
    return load(std::filesystem::path(name_or_path));
}

Cell Layout::at(Position p) const
{
    if (p.row < 0 || p.col < 0 || p.row >= height_ || p.col >= width_) {
        return Cell::wall;
    }
    return cells_[static_cast<std::size_t>(p.row * width_ + p.col)];
}

int Layout::open_index(Position p) const
{
    if (p.row < 0 || p.col < 0 || p.row >= height_ || p.col >= width_) {
        return -1;
    }
    return open_index_[static_cast<std::size_t>(p.row * width_ + p.col)];
}

std::string Layout::to_string() const
{
    std::string s;
    for (int r = 0; r < height_; ++r) {
        for (int c = 0; c < width_; ++c) {
            s.push_back(static_cast<char>(cells_[static_cast<std::size_t>(r * width_ + c)]));
        }
        s.push_back('\n');
    }
    return s;
}

}  // namespace gem::envs
