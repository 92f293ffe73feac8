#include "gem/envs/continuous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gem::envs {

namespace {

void check_action(std::size_t action)
{
    if (action >= continuous_action_count) {
        throw std::invalid_argument("continuous action out of range");
    }
}

}  // namespace

MountainCarState MountainCar::reset(Rng& rng) const
{
    MountainCarState s;
    s.position = uniform(rng, -0.6, -0.4);
    s.velocity = 0.0;
    return s;
}

MountainCarStep MountainCar::step(const MountainCarState& s, std::size_t action) const
{
    check_action(action);
    MountainCarStep out{s, 0.0, false};
    auto& n = out.state;
    n.velocity += (static_cast<double>(action) - 1.0) * 0.001 - 0.0025 * std::cos(3.0 * s.position);
    n.velocity = std::clamp(n.velocity, -max_speed, max_speed);
    n.position = std::clamp(n.position + n.velocity, min_position, max_position);
    if (n.position <= min_position && n.velocity < 0.0) {
        n.velocity = 0.0;
    }
    n.t = s.t + 1;
    if (n.position >= goal_position) {
        out.reward = 1.0;
        out.done = true;
    }
    if (n.t >= continuous_episode_length) {
        out.done = true;
    }
    n.done = out.done;
    return out;
}

std::vector<double> MountainCar::encode(const MountainCarState& s) const
{
    return {(s.position - min_position) / (max_position - min_position),
            (s.velocity + max_speed) / (2.0 * max_speed)};
}

CartpoleState CartpoleSwingup::reset(Rng& rng) const
{
    CartpoleState s;
    s.theta = std::numbers::pi + uniform(rng, -init_range, init_range);
    return s;
}

CartpoleStep CartpoleSwingup::step(const CartpoleState& s, std::size_t action) const
{
    check_action(action);
    const double force = (static_cast<double>(action) - 1.0) * force_mag;
    const double cos = std::cos(s.theta);
    const double sin = std::sin(s.theta);
    const double total_mass = mass_cart + mass_pole;
    const double pl = mass_pole * pole_length;
    const double temp = (force + pl * s.theta_dot * s.theta_dot * sin) / total_mass;
    const double theta_acc = (gravity * sin - cos * temp)
                             / (pole_length * (4.0 / 3.0 - mass_pole * cos * cos / total_mass));
    const double x_acc = temp - pl * theta_acc * cos / total_mass;

    CartpoleStep out{s, 0.0, false};
    auto& n = out.state;
    n.x = std::clamp(s.x + dt * s.x_dot, -x_limit, x_limit);
    n.x_dot = std::clamp(s.x_dot + dt * x_acc, -x_dot_limit, x_dot_limit);
    n.theta = std::fmod(s.theta + dt * s.theta_dot, 2.0 * std::numbers::pi);
    if (n.theta < 0.0) {
        n.theta += 2.0 * std::numbers::pi;
    }
    n.theta_dot = std::clamp(s.theta_dot + dt * theta_acc, -theta_dot_limit, theta_dot_limit);
    n.t = s.t + 1;
    const bool upright = std::cos(n.theta) > 0.5 && std::abs(n.theta_dot) < 1.0 && std::abs(n.x) < 1.0;
    out.reward = upright ? 1.0 : 0.0;
    out.done = std::abs(n.x) >= x_limit || n.t >= continuous_episode_length;
    n.done = out.done;
    return out;
}

std::vector<double> CartpoleSwingup::encode(const CartpoleState& s) const
{
    return {(s.x + x_limit) / (2.0 * x_limit), (s.x_dot + x_dot_limit) / (2.0 * x_dot_limit),
            (std::cos(s.theta) + 1.0) / 2.0, (std::sin(s.theta) + 1.0) / 2.0,
            (s.theta_dot + theta_dot_limit) / (2.0 * theta_dot_limit)};
}

}  // namespace gem::envs
