#include "lexrl/mdp_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lexrl {

void ProblemSpec::validate() const {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("ProblemSpec: gamma must lie in (0, 1), got " +
                                    std::to_string(gamma));
    }
    if (num_constraints < 0) {
        throw std::invalid_argument("ProblemSpec: num_constraints must be non-negative");
    }
    if (static_cast<int>(raw_thresholds.size()) != num_constraints) {
        throw std::invalid_argument("ProblemSpec: expected " + std::to_string(num_constraints) +
                                    " thresholds, got " + std::to_string(raw_thresholds.size()));
    }
    for (double k : raw_thresholds) {
        if (!std::isfinite(k) || k < 0.0) {
            throw std::invalid_argument("ProblemSpec: thresholds must be finite and non-negative");
        }
    }
}

double discount_threshold(double raw_threshold, double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("discount_threshold: gamma must lie in (0, 1)");
    }
    if (!std::isfinite(raw_threshold) || raw_threshold < 0.0) {
        throw std::invalid_argument("discount_threshold: raw threshold must be finite and >= 0");
    }
    return raw_threshold / (1.0 - gamma);
}

double discounted_return(std::span<const double> costs, double gamma) {
    double acc = 0.0;
    double scale = 1.0;
    for (double c : costs) {
        acc += scale * c;
        scale *= gamma;
    }
    return acc;
}

void validate_state(const Environment& env, const StateVector& state) {
    if (static_cast<int>(state.size()) != env.state_dim()) {
        throw std::invalid_argument("state has dimension " + std::to_string(state.size()) +
                                    ", environment expects " + std::to_string(env.state_dim()));
    }
    for (double x : state) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("state contains a non-finite component");
        }
    }
}

void validate_action(const Environment& env, int action) {
    if (action < 0 || action >= env.num_actions()) {
        throw std::out_of_range("action index " + std::to_string(action) +
                                " outside [0, " + std::to_string(env.num_actions()) + ")");
    }
}

}  // namespace lexrl
