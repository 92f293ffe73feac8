#pragma once

#include "gem/random.hpp"

#include <cstddef>
#include <vector>

namespace gem::envs {

// Both tasks take three discrete actions: 0 = push left, 1 = no push, 2 = push right.
inline constexpr std::size_t continuous_action_count = 3;
inline constexpr int continuous_episode_length = 1000;

/// Classic mountain car. velocity += (a-1)*0.001 - 0.0025*cos(3*position), clipped to
/// [-0.07, 0.07]; position += velocity, clipped to [-1.2, 0.6] (velocity zeroed at the
/// left wall). Reward 1 and termination once position >= 0.5.
struct MountainCarState {
    double position = -0.5;
    double velocity = 0.0;
    int t = 0;
    bool done = false;
};

struct MountainCarStep {
    MountainCarState state;
    double reward = 0.0;
    bool done = false;
};

class MountainCar {
public:
    static constexpr double min_position = -1.2;
    static constexpr double max_position = 0.6;
    static constexpr double max_speed = 0.07;
    static constexpr double goal_position = 0.5;

    MountainCarState reset(Rng& rng) const;
    MountainCarStep step(const MountainCarState& s, std::size_t action) const;
    std::vector<double> encode(const MountainCarState& s) const;
    static constexpr std::size_t observation_dim = 2;
};

/// Cart-pole swing-up with the pole starting down (theta = pi, theta = 0 is upright).
/// Euler integration with dt = 0.01:
///   temp      = (F + m_p l theta_dot^2 sin) / (m_c + m_p)
///   theta_acc = (g sin - cos temp) / (l (4/3 - m_p cos^2 / (m_c + m_p)))
///   x_acc     = temp - m_p l theta_acc cos / (m_c + m_p)
/// with F = (a-1)*10, m_c = 1, m_p = 0.1, l = 0.5, g = 9.8. Reward 1 on every step with
/// cos(theta) > 0.5, |theta_dot| < 1 and |x| < 1. The episode ends when |x| reaches 3.
struct CartpoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 3.141592653589793;
    double theta_dot = 0.0;
    int t = 0;
    bool done = false;
};

struct CartpoleStep {
    CartpoleState state;
    double reward = 0.0;
    bool done = false;
};

class CartpoleSwingup {
public:
    static constexpr double dt = 0.01;
    static constexpr double force_mag = 10.0;
    static constexpr double mass_cart = 1.0;
    static constexpr double mass_pole = 0.1;
    static constexpr double pole_length = 0.5;
    static constexpr double gravity = 9.8;
    static constexpr double x_limit = 3.0;
    static constexpr double x_dot_limit = 10.0;
    static constexpr double theta_dot_limit = 20.0;
    static constexpr double init_range = 0.05;

    CartpoleState reset(Rng& rng) const;
    CartpoleStep step(const CartpoleState& s, std::size_t action) const;
    std::vector<double> encode(const CartpoleState& s) const;
    static constexpr std::size_t observation_dim = 5;
};

}  // namespace gem::envs
