#include "lexrl/cartpole.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lexrl/rng.hpp"

namespace lexrl {

std::array<double, 2> cartpole_accelerations(const CartPoleParams& params,
                                             const CartPoleState& state, double force) {
    const double total_mass = params.cart_mass + params.pole_mass;
    const double pole_mass_length = params.pole_mass * params.length;
    const double cos_omega = std::cos(state.omega);
    const double sin_omega = std::sin(state.omega);

    const double temp =
        (force + pole_mass_length * state.omega_dot * state.omega_dot * sin_omega) / total_mass;
    const double omega_ddot =
        (params.gravity * sin_omega - cos_omega * temp) /
        (params.length * (4.0 / 3.0 - params.pole_mass * cos_omega * cos_omega / total_mass));
    const double x_ddot = temp - pole_mass_length * omega_ddot * cos_omega / total_mass;
    return {x_ddot, omega_ddot};
}

CartPole::CartPole(const Options& options) : options_(options) {
    if (options_.params.dt <= 0.0) {
        throw std::invalid_argument("CartPole: dt must be positive");
    }
    if (options_.position_limit <= 0.0 || options_.angle_limit <= 0.0) {
        throw std::invalid_argument("CartPole: termination limits must be positive");
    }
    if (options_.angle_band < 0.0 || options_.position_band < 0.0) {
        throw std::invalid_argument("CartPole: comfort bands must be non-negative");
    }
    if (options_.init_range < 0.0) {
        throw std::invalid_argument("CartPole: init_range must be non-negative");
    }
}

StateVector CartPole::reset(std::uint64_t seed) {
    rng_.seed(seed);
    StateVector state(4);
    for (double& component : state) {
        component = uniform_double(rng_, -options_.init_range, options_.init_range);
    }
    return state;
}

StepOutcome CartPole::step(const StateVector& state, int action) {
    validate_state(*this, state);
    validate_action(*this, action);
    if (is_terminal(state)) {
        throw std::logic_error("CartPole::step called on a terminal state");
    }

    const CartPoleState s{state[0], state[1], state[2], state[3]};
    const auto [x_ddot, omega_ddot] = cartpole_accelerations(options_.params, s, force_for(action));

    const double dt = options_.params.dt;
    StepOutcome out;
    out.next_state = {s.x + dt * s.x_dot, s.x_dot + dt * x_ddot, s.omega + dt * s.omega_dot,
                      s.omega_dot + dt * omega_ddot};
    out.terminal = is_terminal(out.next_state);
    return out;
}

bool CartPole::is_terminal(const StateVector& state) const {
    return std::abs(state[0]) > options_.position_limit ||
           std::abs(state[2]) > options_.angle_limit;
}

double CartPole::cost_channel(int channel, const StateVector& state, int action,
                              const StateVector& next_state) const {
    switch (channel) {
        case 0:
            return is_terminal(next_state) ? options_.terminal_penalty
                                           : std::abs(force_for(action));
        case 1: {
            const StateVector& charged =
                options_.charge_angle_on_next ? next_state : state;
            return std::abs(charged[2]) > options_.angle_band ? 1.0 : 0.0;
        }
        case 2: {
            const StateVector& charged =
                options_.charge_position_on_next ? next_state : state;
            return std::abs(charged[0]) > options_.position_band ? 1.0 : 0.0;
        }
        default:
            throw std::out_of_range("CartPole: cost channel " + std::to_string(channel) +
                                    " outside [0, 2]");
    }
}

std::vector<double> CartPole::features(int channel, const StateVector& state) const {
    if (channel < 0 || channel > num_constraints()) {
        throw std::out_of_range("CartPole: feature channel " + std::to_string(channel) +
                                " outside [0, 2]");
    }
    std::vector<double> scaled(4);
    for (int i = 0; i < 4; ++i) {
        scaled[i] = state[i] / feature_scales_[static_cast<std::size_t>(i)];
    }
    return scaled;
}

double CartPole::force_for(int action) const {
    validate_action(*this, action);
    return forces_[static_cast<std::size_t>(action)];
}

}  // namespace lexrl
