#include "gem/agent/rollout.hpp"

#include <stdexcept>

namespace gem::agent {

namespace {

std::size_t choose(const std::vector<double>& probs, ActionMode mode, Rng& rng)
{
    switch (mode) {
    case ActionMode::greedy:
        return greedy_action(probs);
    case ActionMode::uniform:
        return static_cast<std::size_t>(uniform_index(rng, probs.size()));
    case ActionMode::sample:
        break;
    }
    return sample_action(probs, rng);
}

void index_next(const envs::Environment& env, Transition& tr)
{
    if (env.discrete()) {
        tr.next_state = env.true_state_index();
        tr.next_cell = env.cell_index();
    }
}

}  // namespace

Episode rollout(envs::Environment& env, const PolicyValueNets& nets, Rng& rng, ActionMode mode, int max_steps)
{
    Episode ep;
    std::vector<double> obs = env.reset();
    if (env.discrete()) {
        ep.initial_state = env.true_state_index();
        ep.initial_cell = env.cell_index();
    }
    std::vector<double> input = nets.build_input(obs, -1, 0.0, 0);
    const int limit = max_steps > 0 ? max_steps : env.episode_length();
    for (int t = 0; t < limit; ++t) {
        const Tensor logits = nets.logits(Tensor::matrix(1, input.size(), input));
        const auto probs = softmax(logits.row(0));
        const std::size_t action = choose(probs, mode, rng);
        envs::EnvStep step = env.step(action);
        Transition tr;
        tr.obs = std::move(obs);
        tr.input = std::move(input);
        tr.action = action;
        tr.reward = step.reward;
        tr.done = step.done;
        tr.t = t;
        tr.next_input = nets.build_input(step.observation, static_cast<int>(action), step.reward, t + 1);
        tr.next_obs = std::move(step.observation);
        index_next(env, tr);
        ep.extrinsic_return += tr.reward;
        obs = tr.next_obs;
        input = tr.next_input;
        ep.steps.push_back(std::move(tr));
        if (step.done) {
            break;
        }
    }
    return ep;
}

ActorPool::ActorPool(const envs::Environment& prototype, std::size_t actors, int trace_length, int trace_period,
                     std::uint64_t seed)
    : trace_length_(trace_length), trace_period_(trace_period)
{
    if (actors == 0 || trace_length <= 0 || trace_period <= 0) {
        throw std::invalid_argument("actor pool needs actors and positive trace length/period");
    }
    for (std::size_t i = 0; i < actors; ++i) {
        Actor a;
        a.env = prototype.fresh(split_seed(seed, 2 * i));
        a.rng = Rng(split_seed(seed, 2 * i + 1));
        actors_.push_back(std::move(a));
    }
}

void ActorPool::begin_episode(Actor& a, const PolicyValueNets& nets)
{
    a.obs = a.env->reset();
    a.input = nets.build_input(a.obs, -1, 0.0, 0);
    a.buffer.clear();
    a.base = 0;
    a.next_start = 0;
    a.episode_return = 0.0;
    a.done = false;
}

bool ActorPool::needs_step(const Actor& a) const
{
    return !a.done && a.base + a.buffer.size() < a.next_start + static_cast<std::size_t>(trace_length_);
}

void ActorPool::advance(const std::vector<std::size_t>& which, const PolicyValueNets& nets, ActionMode mode,
                        Collection& out)
{
    const std::size_t in_dim = nets.input_dim();
    std::vector<std::size_t> active;
    while (true) {
        active.clear();
        for (std::size_t i : which) {
            if (needs_step(actors_[i])) {
                active.push_back(i);
            }
        }
        if (active.empty()) {
            return;
        }
        Tensor inputs = Tensor::matrix(active.size(), in_dim);
        for (std::size_t r = 0; r < active.size(); ++r) {
            const auto& src = actors_[active[r]].input;
            std::copy(src.begin(), src.end(), inputs.row(r).begin());
        }
        const Tensor logits = nets.logits(inputs);
        for (std::size_t r = 0; r < active.size(); ++r) {
            Actor& a = actors_[active[r]];
            const auto probs = softmax(logits.row(r));
            const std::size_t action = choose(probs, mode, a.rng);
            envs::EnvStep step = a.env->step(action);
            Transition tr;
            tr.t = static_cast<int>(a.base + a.buffer.size());
            tr.obs = std::move(a.obs);
            tr.input = std::move(a.input);
            tr.action = action;
            tr.reward = step.reward;
            tr.done = step.done;
            tr.next_input = nets.build_input(step.observation, static_cast<int>(action), step.reward, tr.t + 1);
            tr.next_obs = std::move(step.observation);
            index_next(*a.env, tr);
            if (tr.next_state != no_index) {
                out.state_visits.push_back(tr.next_state);
                out.cell_visits.push_back(tr.next_cell);
            }
            a.episode_return += tr.reward;
            a.obs = tr.next_obs;
            a.input = tr.next_input;
            a.done = step.done;
            a.buffer.push_back(std::move(tr));
            ++out.new_frames;
            if (a.done) {
                out.finished_returns.push_back(a.episode_return);
            }
        }
    }
}

bool ActorPool::emit(Actor& a, const PolicyValueNets& nets, Trace& trace)
{
    const std::size_t end = a.base + a.buffer.size();
    if (a.next_start >= end) {
        // The episode ended before this trace slot; start over in a fresh episode.
        begin_episode(a, nets);
        return false;
    }
    trace.start = a.next_start;
    const std::size_t stop = std::min(end, a.next_start + static_cast<std::size_t>(trace_length_));
    trace.steps.assign(a.buffer.begin() + static_cast<std::ptrdiff_t>(a.next_start - a.base),
                       a.buffer.begin() + static_cast<std::ptrdiff_t>(stop - a.base));
    a.next_start += static_cast<std::size_t>(trace_period_);
    if (a.done && a.next_start >= end) {
        begin_episode(a, nets);
    } else {
        const std::size_t drop = std::min(a.next_start, end) - a.base;
        a.buffer.erase(a.buffer.begin(), a.buffer.begin() + static_cast<std::ptrdiff_t>(drop));
        a.base += drop;
    }
    return true;
}

Collection ActorPool::collect(const PolicyValueNets& nets, ActionMode mode)
{
    Collection out;
    if (!started_) {
        // Random first trace offset per actor.
        const int slots = (actors_.front().env->episode_length() + trace_period_ - 1) / trace_period_;
        for (auto& a : actors_) {
            begin_episode(a, nets);
            a.next_start = static_cast<std::size_t>(uniform_index(a.rng, static_cast<std::uint64_t>(slots)))
                           * static_cast<std::size_t>(trace_period_);
        }
        started_ = true;
    }
    std::vector<std::size_t> all(actors_.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    out.traces.resize(actors_.size());
    std::vector<std::size_t> retry;
    advance(all, nets, mode, out);
    for (std::size_t i : all) {
        if (!emit(actors_[i], nets, out.traces[i])) {
            retry.push_back(i);
        }
    }
    if (!retry.empty()) {
        advance(retry, nets, mode, out);
        for (std::size_t i : retry) {
            if (!emit(actors_[i], nets, out.traces[i])) {
                throw std::logic_error("fresh episode produced no transitions");
            }
        }
    }
    frames_ += out.new_frames;
    return out;
}

}  // namespace gem::agent
