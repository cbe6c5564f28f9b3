#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "lexrl/mdp_core.hpp"

namespace lexrl {

/// Physical constants of the cart-pole plant. Defaults match the classic
/// control benchmark; `length` is the half-length of the pole.
struct CartPoleParams {
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double length = 0.5;
    double dt = 0.02;
};

/// (cart position, cart velocity, pole angle, pole angular velocity).
struct CartPoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double omega = 0.0;
    double omega_dot = 0.0;
};

/// (x_ddot, omega_ddot) for the given state under the given force.
std::array<double, 2> cartpole_accelerations(const CartPoleParams& params,
                                             const CartPoleState& state, double force);

/// Cart-pole with a five-level force actuation set and three cost channels:
///   channel 0: actuation cost |u|, replaced by a fixed penalty on entering
///              a terminal state;
///   channel 1: indicator of the pole angle leaving a comfort band;
///   channel 2: indicator of the cart position leaving a comfort band.
/// Channels 1 and 2 are charged on the successor state by default; the flags
/// switch them to the pre-step state.
class CartPole final : public Environment {
public:
    struct Options {
        CartPoleParams params;
        double position_limit = 2.4;
        double angle_limit = 0.21;
        double angle_band = 0.03;
        double position_band = 0.1;
        double terminal_penalty = 10.0;
        double init_range = 0.05;
        bool charge_angle_on_next = true;
        bool charge_position_on_next = true;
    };

    CartPole() : CartPole(Options{}) {}
    explicit CartPole(const Options& options);

    int state_dim() const override { return 4; }
    int num_actions() const override { return 5; }
    int num_constraints() const override { return 2; }

    StateVector reset(std::uint64_t seed) override;
    StepOutcome step(const StateVector& state, int action) override;
    bool is_terminal(const StateVector& state) const override;
    double cost_channel(int channel, const StateVector& state, int action,
                        const StateVector& next_state) const override;
    std::vector<double> features(int channel, const StateVector& state) const override;

    double force_for(int action) const;
    const Options& options() const { return options_; }

private:
    Options options_;
    std::array<double, 5> forces_{-10.0, -5.0, 0.0, 5.0, 10.0};
    std::array<double, 4> feature_scales_{2.4, 3.0, 0.21, 3.0};
    std::mt19937_64 rng_{0};
};

}  // namespace lexrl
