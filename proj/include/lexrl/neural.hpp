#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace lexrl {

/// Dense network shape: ReLU hidden layers, linear output layer. The output
/// width is one Q head per action.
struct NetworkArchitecture {
    int input_dim = 0;
    std::vector<int> hidden_sizes;
    int output_dim = 0;

    /// Flat layer widths, input first: [input_dim, hidden..., output_dim].
    std::vector<int> widths() const;
};

/// Default critic shapes: two 64-wide hidden layers for constraint critics,
/// a 64-16 stack for the primary critic.
NetworkArchitecture constraint_critic_arch(int input_dim, int num_actions);
NetworkArchitecture primary_critic_arch(int input_dim, int num_actions);

/// Weights and biases of one network. `arch` lists layer widths input-first,
/// so weights[l] has shape arch[l+1] x arch[l]. Treated as an immutable
/// value once training finishes.
struct MlpParameters {
    std::vector<int> arch;
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    int input_dim() const { return arch.front(); }
    int output_dim() const { return arch.back(); }
    std::size_t num_layers() const { return weights.size(); }
    NetworkArchitecture architecture() const;
};

/// Fan-in uniform initialisation: W ~ U[-b, b] with b = sqrt(6 / fan_in),
/// biases zero. Draw order is row-major per layer, layers input-first.
MlpParameters init_mlp(const std::vector<int>& widths, std::mt19937_64& rng);
MlpParameters init_mlp(const NetworkArchitecture& arch, std::uint64_t seed);

/// Output activations for a batch of inputs, one column per sample.
Eigen::MatrixXd forward(const MlpParameters& net, const Eigen::MatrixXd& inputs);

/// Single-sample convenience wrapper around the batched forward pass.
Eigen::VectorXd forward_one(const MlpParameters& net, const Eigen::VectorXd& input);

/// Training batch: `features` holds one sample per column, `actions[i]` the
/// output head trained for sample i, `targets[i]` its regression target.
struct Minibatch {
    Eigen::MatrixXd features;
    std::vector<int> actions;
    std::vector<double> targets;

    int size() const { return static_cast<int>(actions.size()); }
};

struct MlpGradient {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

/// Mean over the batch of (Q(x_i)[a_i] - y_i)^2.
double batch_loss(const MlpParameters& net, const Minibatch& batch);

/// Exact gradient of batch_loss with respect to every weight and bias. Only
/// the taken-action heads contribute; the ReLU derivative at 0 is 0.
MlpGradient gradient(const MlpParameters& net, const Minibatch& batch);

/// In-place plain SGD step: p -= learning_rate * g.
void sgd_step(MlpParameters& net, const MlpGradient& grad, double learning_rate);

/// In-place Polyak averaging: target = tau * online + (1 - tau) * target.
void soft_update(MlpParameters& target, const MlpParameters& online, double tau);

/// Geometric decay of the learning rate and the exploration rate:
/// base * decay_rate^(max(1, t - decay_onset) - 1), with t counting schedule
/// units from 1.
struct ScheduleConfig {
    enum class Unit { Episode, Step };

    double base_lr = 1e-4;
    double base_epsilon = 0.5;
    double decay_rate = 0.99;
    std::int64_t decay_onset = 500;
    Unit unit = Unit::Episode;
};

enum class ScheduleKind { LearningRate, Epsilon };

double schedule_value(const ScheduleConfig& cfg, ScheduleKind kind, std::int64_t t);

/// Binary little-endian network files, magic "LEXRLNET" version 1. Layout:
/// magic, u32 version, u32 layer count, per layer u32 rows, u32 cols, then
/// row-major f64 weights followed by f64 biases. Round-trips bit-exactly.
void save_network(const MlpParameters& net, const std::filesystem::path& path);
MlpParameters load_network(const std::filesystem::path& path);

}  // namespace lexrl
