#include "lexrl/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "lexrl/errors.hpp"
#include "lexrl/rng.hpp"
#include "lexrl/text.hpp"

namespace lexrl {

namespace {

// RNG stream tags so every consumer of config.seed draws independently.
enum : std::uint64_t {
    kInitStream = 0,
    kExploreStream = 1,
    kReplayStream = 2,
    kResetStream = 3,
    kRestartStream = 4
};

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& values) {
    return {values.data(), static_cast<Eigen::Index>(values.size())};
}

double bootstrap_target(const TransitionRecord& record, const MlpParameters& online,
                        const MlpParameters& target_net, double gamma, TargetRule rule) {
    if (record.terminal) {
        return record.cost;
    }
    const Eigen::VectorXd q_target = forward_one(target_net, as_vector(record.next_features));
    if (rule == TargetRule::Dqn) {
        return record.cost + gamma * q_target.minCoeff();
    }
    const Eigen::VectorXd q_online = forward_one(online, as_vector(record.next_features));
    Eigen::Index best = 0;
    q_online.minCoeff(&best);
    return record.cost + gamma * q_target(best);
}

void update_step(MlpParameters& online, MlpParameters& target_net, const ReplayBuffer& buffer,
                 const TrainerConfig& config, double learning_rate, std::mt19937_64& rng) {
    const std::vector<TransitionRecord> records =
        buffer.sample(static_cast<std::size_t>(config.minibatch_size), rng);
    const int n = static_cast<int>(records.size());
    const int in_dim = online.input_dim();

    Minibatch batch;
    batch.features.resize(in_dim, n);
    batch.actions.resize(static_cast<std::size_t>(n));
    batch.targets.resize(static_cast<std::size_t>(n));
    Eigen::MatrixXd next_features(in_dim, n);
    for (int i = 0; i < n; ++i) {
        const TransitionRecord& rec = records[static_cast<std::size_t>(i)];
        batch.features.col(i) = as_vector(rec.features);
        next_features.col(i) = as_vector(rec.next_features);
        batch.actions[static_cast<std::size_t>(i)] = rec.action;
    }

    const Eigen::MatrixXd q_target_next = forward(target_net, next_features);
    Eigen::MatrixXd q_online_next;
    if (config.target_rule == TargetRule::DoubleDqn) {
        q_online_next = forward(online, next_features);
    }
    for (int i = 0; i < n; ++i) {
        const TransitionRecord& rec = records[static_cast<std::size_t>(i)];
        double y = rec.cost;
        if (!rec.terminal) {
            if (config.target_rule == TargetRule::DoubleDqn) {
                Eigen::Index best = 0;
                q_online_next.col(i).minCoeff(&best);
                y += config.gamma * q_target_next(best, i);
            } else {
                y += config.gamma * q_target_next.col(i).minCoeff();
            }
        }
        batch.targets[static_cast<std::size_t>(i)] = y;
    }

    sgd_step(online, gradient(online, batch), learning_rate);
    soft_update(target_net, online, config.tau);
}

}  // namespace

void TrainerConfig::validate() const {
    if (episodes < 0) {
        throw std::invalid_argument("TrainerConfig: episodes must be non-negative");
    }
    if (steps_per_episode < 1) {
        throw std::invalid_argument("TrainerConfig: steps_per_episode must be positive");
    }
    if (replay_period < 1) {
        throw std::invalid_argument("TrainerConfig: replay_period must be >= 1");
    }
    if (!(tau >= 0.0) || !(tau <= 1.0)) {
        throw std::invalid_argument("TrainerConfig: tau must lie in [0, 1]");
    }
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("TrainerConfig: gamma must lie in (0, 1)");
    }
    if (minibatch_size < 1) {
        throw std::invalid_argument("TrainerConfig: minibatch_size must be positive");
    }
    if (replay_capacity < 1) {
        throw std::invalid_argument("TrainerConfig: replay_capacity must be positive");
    }
    if (!std::isfinite(init_bias)) {
        throw std::invalid_argument("TrainerConfig: init_bias must be finite");
    }
}

int epsilon_greedy(std::span<const double> q_values, double epsilon, std::mt19937_64& rng) {
    std::vector<int> all(q_values.size());
    std::iota(all.begin(), all.end(), 0);
    return epsilon_greedy(q_values, epsilon, rng, all);
}

int epsilon_greedy(std::span<const double> q_values, double epsilon, std::mt19937_64& rng,
                   std::span<const int> allowed) {
    if (q_values.empty()) {
        throw std::invalid_argument("epsilon_greedy: q_values is empty");
    }
    if (allowed.empty()) {
        throw std::invalid_argument("epsilon_greedy: allowed action set is empty");
    }
    if (!(epsilon >= 0.0) || !(epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon_greedy: epsilon must lie in [0, 1]");
    }
    for (int idx : allowed) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= q_values.size()) {
            throw std::out_of_range("epsilon_greedy: allowed index outside q_values range");
        }
    }

    const double u = uniform_double(rng, 0.0, 1.0);
    if (u < epsilon) {
        return allowed[uniform_below(rng, allowed.size())];
    }
    int best = allowed[0];
    for (int idx : allowed) {
        const double q = q_values[static_cast<std::size_t>(idx)];
        const double q_best = q_values[static_cast<std::size_t>(best)];
        if (q < q_best || (q == q_best && idx < best)) {
            best = idx;
        }
    }
    return best;
}

double dqn_target(const TransitionRecord& record, const MlpParameters& target_net,
                  double gamma) {
    return bootstrap_target(record, target_net, target_net, gamma, TargetRule::Dqn);
}

double double_dqn_target(const TransitionRecord& record, const MlpParameters& online,
                         const MlpParameters& target_net, double gamma) {
    return bootstrap_target(record, online, target_net, gamma, TargetRule::DoubleDqn);
}

CostFn channel_cost(const Environment& env, int channel) {
    if (channel < 0 || channel > env.num_constraints()) {
        throw std::out_of_range("channel_cost: channel " + std::to_string(channel) +
                                " outside [0, " + std::to_string(env.num_constraints()) + "]");
    }
    const Environment* bound = &env;
    return [bound, channel](const StateVector& s, int u, const StateVector& s_next) {
        return bound->cost_channel(channel, s, u, s_next);
    };
}

double lagrangian_cost(std::span<const double> weights,
                       std::span<const double> channel_costs) {
    if (weights.size() != channel_costs.size()) {
        throw std::invalid_argument("lagrangian_cost: weight/cost length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i] * channel_costs[i];
    }
    return acc;
}

CostFn scalarized_cost(const Environment& env, std::vector<double> weights) {
    if (static_cast<int>(weights.size()) != env.num_constraints() + 1) {
        throw std::invalid_argument("scalarized_cost: need one weight per cost channel");
    }
    const Environment* bound = &env;
    return [bound, weights = std::move(weights)](const StateVector& s, int u,
                                                 const StateVector& s_next) {
        std::vector<double> costs(weights.size());
        for (std::size_t c = 0; c < costs.size(); ++c) {
            costs[c] = bound->cost_channel(static_cast<int>(c), s, u, s_next);
        }
        return lagrangian_cost(weights, costs);
    };
}

TrainResult train_critic(Environment& env, int feature_channel, const CostFn& cost,
                         const NetworkArchitecture& arch, const TrainerConfig& config,
                         const ActionFilterFn& filter) {
    config.validate();
    if (feature_channel < 0 || feature_channel > env.num_constraints()) {
        throw std::out_of_range("train_critic: feature channel outside environment range");
    }
    if (arch.output_dim != env.num_actions()) {
        throw std::invalid_argument("train_critic: network output dim must equal action count");
    }
    if (!cost) {
        throw std::invalid_argument("train_critic: cost function is empty");
    }

    std::mt19937_64 init_rng(derive_seed(config.seed, kInitStream));
    std::mt19937_64 explore_rng(derive_seed(config.seed, kExploreStream));
    std::mt19937_64 replay_rng(derive_seed(config.seed, kReplayStream));

    MlpParameters online = init_mlp(arch.widths(), init_rng);
    online.biases.back().array() += config.init_bias;
    MlpParameters target_net = online;
    ReplayBuffer buffer(config.replay_capacity);

    const bool per_step = config.schedules.unit == ScheduleConfig::Unit::Step;
    TrainResult result;
    std::int64_t total_steps = 0;
    std::uint64_t restarts = 0;

    for (int episode = 1; episode <= config.episodes; ++episode) {
        double epsilon = schedule_value(config.schedules, ScheduleKind::Epsilon,
                                        per_step ? total_steps + 1 : episode);
        double learning_rate = schedule_value(config.schedules, ScheduleKind::LearningRate,
                                              per_step ? total_steps + 1 : episode);
        StateVector state = env.reset(derive_seed(config.seed, kResetStream,
                                                  static_cast<std::uint64_t>(episode)));
        double cumulative = 0.0;

        for (int step = 1; step <= config.steps_per_episode; ++step) {
            if (per_step) {
                epsilon =
                    schedule_value(config.schedules, ScheduleKind::Epsilon, total_steps + 1);
                learning_rate = schedule_value(config.schedules, ScheduleKind::LearningRate,
                                               total_steps + 1);
            }
            std::vector<double> features = env.features(feature_channel, state);
            if (static_cast<int>(features.size()) != arch.input_dim) {
                throw std::invalid_argument(
                    "train_critic: feature dimension does not match network input dim");
            }
            const Eigen::VectorXd q = forward_one(online, as_vector(features));
            const std::span<const double> q_span{q.data(),
                                                 static_cast<std::size_t>(q.size())};
            int action = 0;
            if (filter) {
                const std::vector<int> allowed = filter(state, online);
                action = allowed.empty()
                             ? epsilon_greedy(q_span, epsilon, explore_rng)
                             : epsilon_greedy(q_span, epsilon, explore_rng, allowed);
            } else {
                action = epsilon_greedy(q_span, epsilon, explore_rng);
            }

            StepOutcome outcome = env.step(state, action);
            const double step_cost = cost(state, action, outcome.next_state);
            cumulative += step_cost;

            // The simulation runs for the full episode length: entering a
            // terminal state restarts the system from the initial
            // distribution, and the stored transition leads into the restart
            // state. Bootstrapping through the restart keeps the critics on
            // the infinite-horizon discounted costs that the threshold
            // conversion K = raw/(1-gamma) presumes; cutting the value chain
            // at the boundary would price a quick crash below any such K.
            if (outcome.terminal) {
                outcome.next_state =
                    env.reset(derive_seed(config.seed, kRestartStream, ++restarts));
            }

            TransitionRecord record;
            record.features = std::move(features);
            record.action = action;
            record.cost = step_cost;
            record.next_features = env.features(feature_channel, outcome.next_state);
            record.terminal = false;
            record.truncated = step == config.steps_per_episode;
            buffer.push(std::move(record));

            ++total_steps;
            if (total_steps % config.replay_period == 0) {
                update_step(online, target_net, buffer, config, learning_rate, replay_rng);
            }
            state = std::move(outcome.next_state);
        }
        result.log.push_back({episode, cumulative, epsilon, learning_rate});
    }

    result.online = std::move(online);
    return result;
}

void write_training_log(const std::filesystem::path& path, std::span<const EpisodeLog> log) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "episode,cumulative_cost,epsilon,learning_rate\n";
    for (const EpisodeLog& row : log) {
        out << row.episode << ',' << format_double(row.cumulative_cost) << ','
            << format_double(row.epsilon) << ',' << format_double(row.learning_rate) << '\n';
    }
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

}  // namespace lexrl
