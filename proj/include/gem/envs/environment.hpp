#pragma once

#include "gem/envs/continuous.hpp"
#include "gem/envs/grid_world.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gem::envs {

struct EnvStep {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
};

class NotDiscrete : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Stateful episode runner owning one environment and its random stream. Single-threaded;
/// run several instances with independent seeds for parallel rollouts.
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::string name() const = 0;
    virtual std::size_t observation_dim() const = 0;
    virtual std::size_t action_count() const = 0;
    virtual int episode_length() const = 0;

    virtual std::vector<double> reset() = 0;
    virtual EnvStep step(std::size_t action) = 0;
    virtual int timestep() const = 0;

    virtual bool discrete() const { return false; }
    virtual std::size_t state_count() const;
    virtual std::size_t true_state_index() const;
    virtual std::size_t cell_count() const;
    virtual std::size_t cell_index() const;

    virtual std::unique_ptr<Environment> fresh(std::uint64_t seed) const = 0;
};

class GridEnvironment final : public Environment {
public:
    GridEnvironment(GridWorldSpec spec, EncodingMode mode, std::uint64_t seed);

    std::string name() const override { return world_.spec().name; }
    std::size_t observation_dim() const override { return world_.observation_dim(mode_); }
    std::size_t action_count() const override { return grid_action_count; }
    int episode_length() const override { return world_.spec().episode_length; }

    std::vector<double> reset() override;
    EnvStep step(std::size_t action) override;
    int timestep() const override { return state_.t; }

    bool discrete() const override { return true; }
    std::size_t state_count() const override { return world_.state_count(); }
    std::size_t true_state_index() const override { return world_.true_state_index(state_); }
    std::size_t cell_count() const override { return world_.cell_count(); }
    std::size_t cell_index() const override { return world_.cell_index(state_); }

    std::unique_ptr<Environment> fresh(std::uint64_t seed) const override;

    const GridWorld& world() const noexcept { return world_; }
    const GridState& state() const noexcept { return state_; }
    EncodingMode mode() const noexcept { return mode_; }

private:
    GridWorld world_;
    EncodingMode mode_;
    Rng rng_;
    GridState state_;
};

class MountainCarEnvironment final : public Environment {
public:
    explicit MountainCarEnvironment(std::uint64_t seed) : rng_(seed) {}

    std::string name() const override { return "mountain-car"; }
    std::size_t observation_dim() const override { return MountainCar::observation_dim; }
    std::size_t action_count() const override { return continuous_action_count; }
    int episode_length() const override { return continuous_episode_length; }

    std::vector<double> reset() override;
    EnvStep step(std::size_t action) override;
    int timestep() const override { return state_.t; }
    std::unique_ptr<Environment> fresh(std::uint64_t seed) const override;

    const MountainCarState& state() const noexcept { return state_; }

private:
    MountainCar dynamics_;
    Rng rng_;
    MountainCarState state_;
};

class CartpoleSwingupEnvironment final : public Environment {
public:
    explicit CartpoleSwingupEnvironment(std::uint64_t seed) : rng_(seed) {}

    std::string name() const override { return "cartpole-swingup"; }
    std::size_t observation_dim() const override { return CartpoleSwingup::observation_dim; }
    std::size_t action_count() const override { return continuous_action_count; }
    int episode_length() const override { return continuous_episode_length; }

    std::vector<double> reset() override;
    EnvStep step(std::size_t action) override;
    int timestep() const override { return state_.t; }
    std::unique_ptr<Environment> fresh(std::uint64_t seed) const override;

    const CartpoleState& state() const noexcept { return state_; }

private:
    CartpoleSwingup dynamics_;
    Rng rng_;
    CartpoleState state_;
};

/// Grid names (optionally "-noisy"), a layout file path, "mountain-car" or "cartpole-swingup".
/// `episode_length` overrides the grid default when positive.
std::unique_ptr<Environment> make_environment(const std::string& name, EncodingMode mode,
                                              std::uint64_t seed, int episode_length = 0);

EncodingMode encoding_from_string(std::string_view s);

}  // namespace gem::envs
