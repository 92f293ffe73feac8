#pragma once

#include "gem/agent/policy.hpp"
#include "gem/envs/environment.hpp"

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

namespace gem::agent {

inline constexpr std::size_t no_index = std::numeric_limits<std::size_t>::max();

struct Transition {
    std::vector<double> obs;
    std::vector<double> next_obs;
    std::vector<double> input;       // policy features at x_t
    std::vector<double> next_input;  // policy features at x_{t+1}
    std::size_t action = 0;
    double reward = 0.0;  // extrinsic
    bool done = false;
    int t = 0;
    std::size_t next_state = no_index;  // true state index of x_{t+1} (discrete envs)
    std::size_t next_cell = no_index;   // grid cell of x_{t+1} (grid envs)
};

struct Episode {
    std::vector<Transition> steps;
    double extrinsic_return = 0.0;
    std::size_t initial_state = no_index;
    std::size_t initial_cell = no_index;

    bool success() const noexcept { return extrinsic_return > 0.0; }
};

enum class ActionMode { sample, greedy, uniform };

/// Resets `env` and plays one episode (at most `max_steps` steps when positive).
/// Action draws use `rng`; environment randomness stays inside `env`.
Episode rollout(envs::Environment& env, const PolicyValueNets& nets, Rng& rng, ActionMode mode = ActionMode::sample,
                int max_steps = 0);

/// Contiguous transitions from one episode.
struct Trace {
    std::vector<Transition> steps;
    std::size_t start = 0;  // index of the first transition within its episode
};

struct Collection {
    std::vector<Trace> traces;                 // one per actor
    std::vector<std::size_t> state_visits;     // x_{t+1} indices of newly played steps
    std::vector<std::size_t> cell_visits;
    std::vector<double> finished_returns;      // extrinsic returns of episodes that ended
    std::uint64_t new_frames = 0;
};

/// Persistent actors that keep their episodes running across calls. Every call hands out one
/// trace per actor: trace i of an episode covers steps [i * period, i * period + length).
/// Actors start at random trace offsets so a batch is not in lockstep.
class ActorPool {
public:
    ActorPool(const envs::Environment& prototype, std::size_t actors, int trace_length, int trace_period,
              std::uint64_t seed);

    Collection collect(const PolicyValueNets& nets, ActionMode mode = ActionMode::sample);

    std::size_t size() const noexcept { return actors_.size(); }
    std::uint64_t frames() const noexcept { return frames_; }

private:
    struct Actor {
        std::unique_ptr<envs::Environment> env;
        Rng rng;
        std::vector<Transition> buffer;  // transitions [base, base + buffer.size()) of the episode
        std::size_t base = 0;
        std::size_t next_start = 0;
        std::vector<double> obs;
        std::vector<double> input;
        double episode_return = 0.0;
        bool done = true;
    };

    void begin_episode(Actor& a, const PolicyValueNets& nets);
    bool needs_step(const Actor& a) const;
    void advance(const std::vector<std::size_t>& which, const PolicyValueNets& nets, ActionMode mode, Collection& out);
    bool emit(Actor& a, const PolicyValueNets& nets, Trace& trace);

    std::vector<Actor> actors_;
    int trace_length_;
    int trace_period_;
    std::uint64_t frames_ = 0;
    bool started_ = false;
};

}  // namespace gem::agent
