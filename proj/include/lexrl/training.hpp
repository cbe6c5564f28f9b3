#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "lexrl/mdp_core.hpp"
#include "lexrl/neural.hpp"
#include "lexrl/replay.hpp"

namespace lexrl {

enum class TargetRule { Dqn, DoubleDqn };

struct TrainerConfig {
    int episodes = 400;
    int steps_per_episode = 200;
    int replay_period = 1;
    double tau = 0.1;
    double gamma = 0.995;
    int minibatch_size = 64;
    std::size_t replay_capacity = 100000;
    ScheduleConfig schedules;
    TargetRule target_rule = TargetRule::DoubleDqn;
    // Added to the output-layer biases at initialization. Costs are
    // nonnegative, so a positive value starts every estimate pessimistic and
    // training grinds values down where data reaches; action values the
    // behavior stops visiting keep their inflated level.
    double init_bias = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// With probability epsilon a uniform random action, otherwise the index
/// minimizing q_values (costs are minimized); ties break to the lowest
/// index. The restricted overload draws and minimizes over `allowed` only.
/// Exactly one uniform draw decides explore-vs-exploit, then at most one
/// more picks the random action, so the stream advances reproducibly.
int epsilon_greedy(std::span<const double> q_values, double epsilon, std::mt19937_64& rng);
int epsilon_greedy(std::span<const double> q_values, double epsilon, std::mt19937_64& rng,
                   std::span<const int> allowed);

/// Fig. 2 regression targets under cost minimization. Terminal transitions
/// regress to the bare cost; truncated-but-nonterminal transitions bootstrap
/// like ordinary ones.
double dqn_target(const TransitionRecord& record, const MlpParameters& target_net,
                  double gamma);
double double_dqn_target(const TransitionRecord& record, const MlpParameters& online,
                         const MlpParameters& target_net, double gamma);

/// One-step cost of a transition, as seen by the critic being trained.
using CostFn = std::function<double(const StateVector&, int, const StateVector&)>;

/// Optional behavior restriction: maps (state, current online parameters) to
/// the allowed action indices. An empty result means no restriction.
using ActionFilterFn =
    std::function<std::vector<int>(const StateVector&, const MlpParameters&)>;

/// The environment's own channel as a CostFn.
CostFn channel_cost(const Environment& env, int channel);

/// Inner product of the weight vector with the per-channel one-step costs.
double lagrangian_cost(std::span<const double> weights, std::span<const double> channel_costs);

/// CostFn summing weights[c] * env.cost_channel(c, ...) over every channel.
CostFn scalarized_cost(const Environment& env, std::vector<double> weights);

struct EpisodeLog {
    int episode = 0;
    double cumulative_cost = 0.0;
    double epsilon = 0.0;
    double learning_rate = 0.0;
};

struct TrainResult {
    MlpParameters online;
    std::vector<EpisodeLog> log;
};

/// Offline training of one critic (Fig. 2): episodes of ε-greedy rollouts
/// charging `cost`, replay pushes, a minibatch double-DQN/DQN update every
/// replay_period steps, and a soft target update after each gradient step.
/// `feature_channel` selects the environment feature map. The whole run is a
/// pure function of (arch, config); all randomness derives from config.seed.
TrainResult train_critic(Environment& env, int feature_channel, const CostFn& cost,
                         const NetworkArchitecture& arch, const TrainerConfig& config,
                         const ActionFilterFn& filter = nullptr);

/// CSV with header episode,cumulative_cost,epsilon,learning_rate.
void write_training_log(const std::filesystem::path& path, std::span<const EpisodeLog> log);

}  // namespace lexrl
