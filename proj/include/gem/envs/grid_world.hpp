#pragma once

#include "gem/envs/layout.hpp"
#include "gem/random.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace gem::envs {

enum class Action : std::uint8_t { noop = 0, up = 1, down = 2, left = 3, right = 4 };
inline constexpr std::size_t grid_action_count = 5;

enum class EncodingMode { feature, pixel };

struct GridWorldSpec {
    std::string name;
    Layout layout;
    int episode_length = 30;
    bool noisy = false;

    /// "2-rooms", "16-leaves", "2-keys", each optionally suffixed "-noisy".
    static GridWorldSpec builtin(std::string_view name);
};

struct GridState {
    Position agent;
    int goal = 0;                      // index into layout.goals()
    std::vector<std::uint8_t> keys;    // per key: collected
    std::vector<std::uint8_t> doors;   // per door: opened
    int t = 0;
    std::array<double, 2> noise{0.0, 0.0};
    bool done = false;

    friend bool operator==(const GridState&, const GridState&) = default;
};

struct GridStep {
    GridState state;
    double reward = 0.0;
    bool done = false;
};

class StepAfterDone : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Deterministic grid world over a validated layout. All randomness comes from the caller's Rng.
class GridWorld {
public:
    explicit GridWorld(GridWorldSpec spec);

    const GridWorldSpec& spec() const noexcept { return spec_; }
    const Layout& layout() const noexcept { return spec_.layout; }

    GridState reset(Rng& rng) const;
    GridStep step(const GridState& state, Action action, Rng& rng) const;

    std::vector<double> encode(const GridState& state, EncodingMode mode) const;
    std::size_t observation_dim(EncodingMode mode) const;

    /// Dense index over reachable (position, goal, keys, doors); noise excluded.
    std::size_t true_state_index(const GridState& state) const;
    std::size_t state_count() const noexcept { return state_index_.size(); }
    /// Index of the agent's cell among open cells (heatmap coordinate).
    std::size_t cell_index(const GridState& state) const;
    std::size_t cell_count() const noexcept { return spec_.layout.open_cells().size(); }

    /// Shortest number of steps from spawn `s` to goal `g` respecting keys and doors; -1 if unreachable.
    int shortest_path(std::size_t spawn, std::size_t goal) const;

    /// Every reachable configuration (used to enumerate states for embedding export).
    std::vector<GridState> reachable_states() const;

private:
    std::uint64_t pack(const GridState& s) const;
    GridState canonical(Position p, int goal, std::uint32_t keys, std::uint32_t doors) const;
    std::vector<GridState> successors(const GridState& s) const;
    Position target(Position p, Action a) const;
    GridStep transition(const GridState& state, Action action) const;
    void draw_noise(GridState& s, Rng& rng) const;

    GridWorldSpec spec_;
    std::unordered_map<std::uint64_t, std::size_t> state_index_;
    std::vector<GridState> reachable_;
};

}  // namespace gem::envs
