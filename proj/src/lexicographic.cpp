#include "lexrl/lexicographic.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace lexrl {

namespace {

std::vector<double> evaluate_critic(const LexAgentConfig& config, int channel,
                                    const StateVector& state) {
    const auto& critic = config.critics[static_cast<std::size_t>(channel)];
    if (!critic) {
        throw std::logic_error("lexicographic agent: missing critic for channel " +
                               std::to_string(channel));
    }
    std::vector<double> q = critic(state);
    if (static_cast<int>(q.size()) != config.num_actions) {
        throw std::logic_error("lexicographic agent: critic " + std::to_string(channel) +
                               " returned " + std::to_string(q.size()) + " values, expected " +
                               std::to_string(config.num_actions));
    }
    return q;
}

int argmin_over(std::span<const int> candidates, std::span<const double> q) {
    int best = candidates[0];
    for (int u : candidates) {
        const double value = q[static_cast<std::size_t>(u)];
        const double best_value = q[static_cast<std::size_t>(best)];
        if (value < best_value || (value == best_value && u < best)) {
            best = u;
        }
    }
    return best;
}

}  // namespace

void LexAgentConfig::validate() const {
    if (critics.empty()) {
        throw std::invalid_argument("lexicographic agent: needs at least the Q_0 critic");
    }
    if (critics.size() != thresholds.size() + 1) {
        throw std::invalid_argument("lexicographic agent: critic count must be one more than "
                                    "threshold count");
    }
    if (num_actions < 1) {
        throw std::invalid_argument("lexicographic agent: num_actions must be positive");
    }
}

ConstraintActionSets constraint_action_sets(const StateVector& state,
                                            const LexAgentConfig& config) {
    config.validate();
    const int num_constraints = config.num_constraints();

    ConstraintActionSets out;
    std::vector<int> previous(static_cast<std::size_t>(config.num_actions));
    std::iota(previous.begin(), previous.end(), 0);

    for (int c = 1; c <= num_constraints; ++c) {
        const std::vector<double> q = evaluate_critic(config, c, state);
        const double bound = config.thresholds[static_cast<std::size_t>(c - 1)];
        std::vector<int> current;
        for (int u : previous) {
            if (q[static_cast<std::size_t>(u)] <= bound) {
                current.push_back(u);
            }
        }
        out.sets.push_back(current);
        if (current.empty()) {
            out.v = c - 1;
            return out;
        }
        previous = std::move(current);
    }
    out.v = num_constraints;
    return out;
}

LexSelection lex_select_action(const StateVector& state, const LexAgentConfig& config) {
    const ConstraintActionSets sets = constraint_action_sets(state, config);
    const int num_constraints = config.num_constraints();

    std::vector<int> full(static_cast<std::size_t>(config.num_actions));
    std::iota(full.begin(), full.end(), 0);

    // A_v: the deepest non-empty set, with A_0 the full action set.
    const std::span<const int> candidates =
        sets.v == 0 ? std::span<const int>(full)
                    : std::span<const int>(sets.sets[static_cast<std::size_t>(sets.v - 1)]);

    LexSelection selection;
    selection.used_channel = sets.v == num_constraints ? 0 : sets.v + 1;
    const std::vector<double> q = evaluate_critic(config, selection.used_channel, state);
    selection.action = argmin_over(candidates, q);
    return selection;
}

LexAgentConfig make_agent(std::vector<CriticFn> critics, std::span<const double> raw_thresholds,
                          double gamma, int num_actions) {
    if (critics.size() != raw_thresholds.size() + 1) {
        throw std::invalid_argument("make_agent: need exactly one more critic than thresholds");
    }
    LexAgentConfig config;
    config.critics = std::move(critics);
    config.num_actions = num_actions;
    config.thresholds.reserve(raw_thresholds.size());
    for (double raw : raw_thresholds) {
        config.thresholds.push_back(discount_threshold(raw, gamma));
    }
    config.validate();
    return config;
}

LexAgentConfig make_agent(const Environment& env, std::span<const MlpParameters> critics,
                          std::span<const double> raw_thresholds, double gamma) {
    std::vector<CriticFn> fns;
    fns.reserve(critics.size());
    for (std::size_t c = 0; c < critics.size(); ++c) {
        fns.push_back(network_critic(env, critics[c], static_cast<int>(c)));
    }
    return make_agent(std::move(fns), raw_thresholds, gamma, env.num_actions());
}

CriticFn network_critic(const Environment& env, MlpParameters params, int channel) {
    if (channel < 0 || channel > env.num_constraints()) {
        throw std::out_of_range("network_critic: channel outside environment range");
    }
    const Environment* bound = &env;
    return [bound, channel, params = std::move(params)](const StateVector& state) {
        const std::vector<double> features = bound->features(channel, state);
        const Eigen::VectorXd input = Eigen::Map<const Eigen::VectorXd>(
            features.data(), static_cast<Eigen::Index>(features.size()));
        const Eigen::VectorXd q = forward_one(params, input);
        return std::vector<double>(q.data(), q.data() + q.size());
    };
}

}  // namespace lexrl
