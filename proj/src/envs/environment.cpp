#include "gem/envs/environment.hpp"

#include <filesystem>

namespace gem::envs {

std::size_t Environment::state_count() const
{
    throw NotDiscrete(name() + " has no finite state index");
}

std::size_t Environment::true_state_index() const
{
    throw NotDiscrete(name() + " has no finite state index");
}

std::size_t Environment::cell_count() const
{
    throw NotDiscrete(name() + " has no grid cells");
}

std::size_t Environment::cell_index() const
{
    throw NotDiscrete(name() + " has no grid cells");
}

GridEnvironment::GridEnvironment(GridWorldSpec spec, EncodingMode mode, std::uint64_t seed)
    : world_(std::move(spec)), mode_(mode), rng_(seed)
{
    state_ = world_.reset(rng_);
}

std::vector<double> GridEnvironment::reset()
{
    state_ = world_.reset(rng_);
    return world_.encode(state_, mode_);
}

EnvStep GridEnvironment::step(std::size_t action)
{
    GridStep r = world_.step(state_, static_cast<Action>(action), rng_);
    state_ = std::move(r.state);
    return {world_.encode(state_, mode_), r.reward, r.done};
}

std::unique_ptr<Environment> GridEnvironment::fresh(std::uint64_t seed) const
{
    return std::make_unique<GridEnvironment>(world_.spec(), mode_, seed);
}

std::vector<double> MountainCarEnvironment::reset()
{
    state_ = dynamics_.reset(rng_);
    return dynamics_.encode(state_);
}

EnvStep MountainCarEnvironment::step(std::size_t action)
{
    if (state_.done) {
        throw StepAfterDone("step called on a finished episode");
    }
    const MountainCarStep r = dynamics_.step(state_, action);
    state_ = r.state;
    return {dynamics_.encode(state_), r.reward, r.done};
}

std::unique_ptr<Environment> MountainCarEnvironment::fresh(std::uint64_t seed) const
{
    return std::make_unique<MountainCarEnvironment>(seed);
}

std::vector<double> CartpoleSwingupEnvironment::reset()
{
    state_ = dynamics_.reset(rng_);
    return dynamics_.encode(state_);
}

EnvStep CartpoleSwingupEnvironment::step(std::size_t action)
{
    if (state_.done) {
        throw StepAfterDone("step called on a finished episode");
    }
    const CartpoleStep r = dynamics_.step(state_, action);
    state_ = r.state;
    return {dynamics_.encode(state_), r.reward, r.done};
}

std::unique_ptr<Environment> CartpoleSwingupEnvironment::fresh(std::uint64_t seed) const
{
    return std::make_unique<CartpoleSwingupEnvironment>(seed);
}

std::unique_ptr<Environment> make_environment(const std::string& name, EncodingMode mode,
                                              std::uint64_t seed, int episode_length)
{
    if (name == "mountain-car") {
        return std::make_unique<MountainCarEnvironment>(seed);
    }
    if (name == "cartpole-swingup") {
        return std::make_unique<CartpoleSwingupEnvironment>(seed);
    }
    GridWorldSpec spec;
    std::string base = name;
    const bool noisy = name.ends_with("-noisy");
    if (noisy) {
        base.resize(base.size() - 6);
    }
    bool builtin = false;
    for (const auto& n : builtin_layout_names()) {
        builtin = builtin || n == base;
    }
    if (builtin) {
        spec = GridWorldSpec::builtin(name);
    } else {
        spec.name = name;
        spec.layout = Layout::load(base);
        spec.noisy = noisy;
    }
    if (episode_length > 0) {
        spec.episode_length = episode_length;
    }
    return std::make_unique<GridEnvironment>(std::move(spec), mode, seed);
}

EncodingMode encoding_from_string(std::string_view s)
{
    if (s == "feature") {
        return EncodingMode::feature;
    }
    if (s == "pixel") {
        return EncodingMode::pixel;
    }
    throw std::invalid_argument("unknown encoding mode '" + std::string(s) + "'");
}

}  // namespace gem::envs
