#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lexrl {

/// Observed state, one real per component. Length must match the owning
/// environment's state dimension and every entry must be finite.
using StateVector = std::vector<double>;

/// One experience tuple as stored in a replay buffer. Features are already
/// mapped through the channel's feature map. `terminal` marks entry into a
/// genuinely terminal state; `truncated` marks an episode cut off by the
/// horizon, which still bootstraps.
struct TransitionRecord {
    std::vector<double> features;
    int action = 0;
    double cost = 0.0;
    std::vector<double> next_features;
    bool terminal = false;
    bool truncated = false;
};

/// Discount factor, constraint count and raw chance-constraint thresholds
/// of one constrained control problem, ordered by ascending priority index
/// (index 1 is the highest priority).
struct ProblemSpec {
    double gamma = 0.995;
    int num_constraints = 0;
    std::vector<double> raw_thresholds;

    void validate() const;
};

/// Converts a raw chance-constraint probability threshold into the bound on
/// the discounted constraint cost: raw / (1 - gamma).
double discount_threshold(double raw_threshold, double gamma);

/// Sum of gamma^t * costs[t]; an empty sequence returns 0.
double discounted_return(std::span<const double> costs, double gamma);

struct StepOutcome {
    StateVector next_state;
    bool terminal = false;
};

/// Contract shared by every environment the trainers and evaluators drive.
///
/// reset(seed) must be reproducible per seed. step rejects terminal states
/// and invalid action indices. Cost channels are indexed 0..num_constraints()
/// and return finite non-negative values; channel 0 is the primary cost.
/// Instances may hold mutable RNG state and are single-owner.
class Environment {
public:
    virtual ~Environment() = default;

    virtual int state_dim() const = 0;
    virtual int num_actions() const = 0;
    virtual int num_constraints() const = 0;

    virtual StateVector reset(std::uint64_t seed) = 0;
    virtual StepOutcome step(const StateVector& state, int action) = 0;
    virtual bool is_terminal(const StateVector& state) const = 0;
    virtual double cost_channel(int channel, const StateVector& state, int action,
                                const StateVector& next_state) const = 0;
    virtual std::vector<double> features(int channel, const StateVector& state) const = 0;
};

/// Throws std::invalid_argument unless `state` has the environment's
/// dimension and only finite entries.
void validate_state(const Environment& env, const StateVector& state);

/// Throws std::out_of_range unless `action` is in [0, num_actions()).
void validate_action(const Environment& env, int action);

}  // namespace lexrl
