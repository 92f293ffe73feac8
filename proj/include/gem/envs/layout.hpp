#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gem::envs {

enum class Cell : char {
    wall = '#',
    free = '.',
    spawn = 'B',
    goal = 'G',
    key = 'K',
    door = 'D',
};

struct Position {
    int row = 0;
    int col = 0;
    friend bool operator==(const Position&, const Position&) = default;
};

/// Parsed ASCII grid. Cells outside the grid are walls.
class Layout {
public:
    Layout() = default;
    static Layout parse(std::string_view text);
    static Layout load(const std::filesystem::path& path);
    /// Built-in layout by name ("2-rooms", "16-leaves", "2-keys"); otherwise treated as a path.
    static Layout named(std::string_view name_or_path);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    Cell at(Position p) const;
    bool passable_kind(Position p) const { return at(p) != Cell::wall; }

    const std::vector<Position>& spawns() const noexcept { return spawns_; }
    const std::vector<Position>& goals() const noexcept { return goals_; }
    const std::vector<Position>& keys() const noexcept { return keys_; }
    const std::vector<Position>& doors() const noexcept { return doors_; }
    /// Every non-wall cell in row-major order; heatmaps and one-hot positions index into this.
    const std::vector<Position>& open_cells() const noexcept { return open_; }
    /// Index of `p` in open_cells(), or -1 for walls.
    int open_index(Position p) const;

    std::string to_string() const;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<Cell> cells_;
    std::vector<int> open_index_;
    std::vector<Position> spawns_, goals_, keys_, doors_, open_;
};

std::vector<std::string> builtin_layout_names();
std::string_view builtin_layout_text(std::string_view name);

class LayoutError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gem::envs
