#include "gem/envs/grid_world.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace gem::envs {

namespace {

std::uint32_t mask_of(const std::vector<std::uint8_t>& flags)
{
    std::uint32_t m = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i] != 0) {
            m |= 1u << i;
        }
    }
    return m;
}

bool any_set(const std::vector<std::uint8_t>& flags)
{
    return std::any_of(flags.begin(), flags.end(), [](std::uint8_t f) { return f != 0; });
}

int index_of(const std::vector<Position>& cells, Position p)
{
    const auto it = std::find(cells.begin(), cells.end(), p);
    return it == cells.end() ? -1 : static_cast<int>(it - cells.begin());
}

}  // namespace

GridWorldSpec GridWorldSpec::builtin(std::string_view name)
{
    std::string base(name);
    bool noisy = false;
    constexpr std::string_view suffix = "-noisy";
    if (base.size() > suffix.size() && base.ends_with(suffix)) {
        noisy = true;
        base.resize(base.size() - suffix.size());
    }
    GridWorldSpec spec;
    spec.name = std::string(name);
    spec.layout = Layout::parse(builtin_layout_text(base));
    spec.noisy = noisy;
    if (base == "2-rooms") {
        spec.episode_length = 30;
    } else if (base == "16-leaves") {
        spec.episode_length = 18;
    } else {
        spec.episode_length = 30;
    }
    return spec;
}

GridWorld::GridWorld(GridWorldSpec spec) : spec_(std::move(spec))
{
    if (spec_.episode_length <= 0) {
        throw LayoutError("episode length must be positive");
    }
    const Layout& l = spec_.layout;
    // Enumerate every configuration reachable from any (spawn, goal) start.
    std::deque<GridState> frontier;
    for (const Position& s : l.spawns()) {
        for (std::size_t g = 0; g < l.goals().size(); ++g) {
            GridState start = canonical(s, static_cast<int>(g), 0, 0);
            if (state_index_.emplace(pack(start), reachable_.size()).second) {
                reachable_.push_back(start);
                frontier.push_back(start);
            }
        }
    }
    while (!frontier.empty()) {
        const GridState s = frontier.front();
        frontier.pop_front();
        for (const GridState& n : successors(s)) {
            if (state_index_.emplace(pack(n), reachable_.size()).second) {
                reachable_.push_back(n);
                frontier.push_back(n);
            }
        }
    }
    for (std::size_t s = 0; s < l.spawns().size(); ++s) {
        for (std::size_t g = 0; g < l.goals().size(); ++g) {
            const int d = shortest_path(s, g);
            if (d < 0 || d > spec_.episode_length) {
                throw LayoutError("goal " + std::to_string(g) + " is not reachable from spawn "
                                  + std::to_string(s) + " within "
                                  + std::to_string(spec_.episode_length) + " steps (distance "
                                  + std::to_string(d) + ")");
            }
        }
    }
}

GridState GridWorld::canonical(Position p, int goal, std::uint32_t keys, std::uint32_t doors) const
{
    GridState s;
    s.agent = p;
    s.goal = goal;
    s.keys.resize(spec_.layout.keys().size());
    s.doors.resize(spec_.layout.doors().size());
    for (std::size_t i = 0; i < s.keys.size(); ++i) {
        s.keys[i] = static_cast<std::uint8_t>((keys >> i) & 1u);
    }
    for (std::size_t i = 0; i < s.doors.size(); ++i) {
        s.doors[i] = static_cast<std::uint8_t>((doors >> i) & 1u);
    }
    s.done = (p == spec_.layout.goals()[static_cast<std::size_t>(goal)]);
    return s;
}

std::uint64_t GridWorld::pack(const GridState& s) const
{
    const Layout& l = spec_.layout;
    const auto cell = static_cast<std::uint64_t>(l.open_index(s.agent));
    const std::uint64_t config = cell * l.goals().size() + static_cast<std::uint64_t>(s.goal);
    return (config << 32) | (static_cast<std::uint64_t>(mask_of(s.keys)) << 16) | mask_of(s.doors);
}

Position GridWorld::target(Position p, Action a) const
{
    switch (a) {
    case Action::up:
        return {p.row - 1, p.col};
    case Action::down:
        return {p.row + 1, p.col};
    case Action::left:
        return {p.row, p.col - 1};
    case Action::right:
        return {p.row, p.col + 1};
    case Action::noop:
        break;
    }
    return p;
}

GridStep GridWorld::transition(const GridState& state, Action action) const
{
    const Layout& l = spec_.layout;
    GridStep out{state, 0.0, false};
    const Position next = target(state.agent, action);
    const Cell cell = l.at(next);
    if (cell == Cell::wall) {
        return out;
    }
    if (cell == Cell::door) {
        const int d = index_of(l.doors(), next);
        if (out.state.doors[static_cast<std::size_t>(d)] == 0) {
            if (!any_set(out.state.keys)) {
                return out;
            }
            out.state.doors[static_cast<std::size_t>(d)] = 1;
        }
    }
    out.state.agent = next;
    if (cell == Cell::key) {
        out.state.keys[static_cast<std::size_t>(index_of(l.keys(), next))] = 1;
    }
    if (next == l.goals()[static_cast<std::size_t>(state.goal)]) {
        out.reward = 1.0;
        out.done = true;
    }
    return out;
}

std::vector<GridState> GridWorld::successors(const GridState& s) const
{
    std::vector<GridState> out;
    if (s.done) {
        return out;
    }
    for (std::size_t a = 0; a < grid_action_count; ++a) {
        GridStep r = transition(s, static_cast<Action>(a));
        r.state.done = r.done;
        out.push_back(std::move(r.state));
    }
    return out;
}

void GridWorld::draw_noise(GridState& s, Rng& rng) const
{
    if (!spec_.noisy) {
        return;
    }
    for (double& n : s.noise) {
        n = static_cast<double>(uniform_index(rng, 256)) / 255.0;
    }
}

GridState GridWorld::reset(Rng& rng) const
{
    const Layout& l = spec_.layout;
    const auto spawn = uniform_index(rng, l.spawns().size());
    const auto goal = uniform_index(rng, l.goals().size());
    GridState s = canonical(l.spawns()[spawn], static_cast<int>(goal), 0, 0);
    s.done = false;
    draw_noise(s, rng);
    return s;
}

GridStep GridWorld::step(const GridState& state, Action action, Rng& rng) const
{
    if (state.done) {
        throw StepAfterDone("step called on a finished episode");
    }
    if (static_cast<std::size_t>(action) >= grid_action_count) {
        throw std::invalid_argument("grid action out of range");
    }
    GridStep out = transition(state, action);
    out.state.t = state.t + 1;
    if (out.state.t >= spec_.episode_length) {
        out.done = true;
    }
    out.state.done = out.done;
    draw_noise(out.state, rng);
    return out;
}

std::size_t GridWorld::observation_dim(EncodingMode mode) const
{
    const Layout& l = spec_.layout;
    const std::size_t noise = spec_.noisy ? 2 : 0;
    if (mode == EncodingMode::feature) {
        return l.open_cells().size() + l.goals().size() + l.keys().size() + l.doors().size()
               + noise;
    }
    return static_cast<std::size_t>(l.height() * l.width()) * 3 + (spec_.noisy ? 3 : 0);
}

std::vector<double> GridWorld::encode(const GridState& state, EncodingMode mode) const
{
    const Layout& l = spec_.layout;
    std::vector<double> obs(observation_dim(mode), 0.0);
    if (mode == EncodingMode::feature) {
        std::size_t offset = 0;
        obs[offset + static_cast<std::size_t>(l.open_index(state.agent))] = 1.0;
        offset += l.open_cells().size();
        obs[offset + static_cast<std::size_t>(state.goal)] = 1.0;
        offset += l.goals().size();
        for (std::size_t i = 0; i < state.keys.size(); ++i) {
            obs[offset + i] = state.keys[i];
        }
        offset += l.keys().size();
        for (std::size_t i = 0; i < state.doors.size(); ++i) {
            obs[offset + i] = state.doors[i];
        }
        offset += l.doors().size();
        if (spec_.noisy) {
            obs[offset] = state.noise[0];
            obs[offset + 1] = state.noise[1];
        }
        return obs;
    }
    auto paint = [&](Position p, double r, double g, double b) {
        const auto base = static_cast<std::size_t>((p.row * l.width() + p.col) * 3);
        obs[base] = r;
        obs[base + 1] = g;
        obs[base + 2] = b;
    };
    for (int r = 0; r < l.height(); ++r) {
        for (int c = 0; c < l.width(); ++c) {
            if (l.at({r, c}) == Cell::wall) {
                paint({r, c}, 0.5, 0.5, 0.5);
            }
        }
    }
    for (std::size_t i = 0; i < l.keys().size(); ++i) {
        if (state.keys[i] == 0) {
            paint(l.keys()[i], 0.6, 0.8, 0.0);
        }
    }
    for (std::size_t i = 0; i < l.doors().size(); ++i) {
        if (state.doors[i] == 0) {
            paint(l.doors()[i], 0.6, 0.3, 0.1);
        }
    }
    paint(l.goals()[static_cast<std::size_t>(state.goal)], 1.0, 0.5, 0.0);
    paint(state.agent, 0.0, 0.0, 1.0);
    if (spec_.noisy) {
        const std::size_t base = obs.size() - 3;
        obs[base] = state.noise[0];
        obs[base + 1] = state.noise[1];
    }
    return obs;
}

std::size_t GridWorld::true_state_index(const GridState& state) const
{
    const auto it = state_index_.find(pack(state));
    if (it == state_index_.end()) {
        throw std::invalid_argument("state is not reachable in layout " + spec_.name);
    }
    return it->second;
}

std::size_t GridWorld::cell_index(const GridState& state) const
{
    return static_cast<std::size_t>(spec_.layout.open_index(state.agent));
}

int GridWorld::shortest_path(std::size_t spawn, std::size_t goal) const
{
    const Layout& l = spec_.layout;
    GridState start = canonical(l.spawns().at(spawn), static_cast<int>(goal), 0, 0);
    if (start.done) {
        return 0;
    }
    std::unordered_map<std::uint64_t, int> dist{{pack(start), 0}};
    std::deque<GridState> frontier{start};
    while (!frontier.empty()) {
        const GridState s = frontier.front();
        frontier.pop_front();
        const int d = dist[pack(s)];
        for (const GridState& n : successors(s)) {
            if (dist.emplace(pack(n), d + 1).second) {
                if (n.done) {
                    return d + 1;
                }
                frontier.push_back(n);
            }
        }
    }
    return -1;
}

std::vector<GridState> GridWorld::reachable_states() const
{
    return reachable_;
}

}  // namespace gem::envs
