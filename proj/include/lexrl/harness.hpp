#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexrl/cartpole.hpp"
#include "lexrl/config.hpp"
#include "lexrl/lexicographic.hpp"
#include "lexrl/neural.hpp"
#include "lexrl/oracle.hpp"
#include "lexrl/training.hpp"

namespace lexrl {

enum class EvalMode { Single, Lex, Lagrangian };

/// One executed evaluation step. Position and angle are read off the
/// successor state, so terminal-entry steps are counted and nothing after
/// termination is.
struct EvalStep {
    double position = 0.0;
    double angle = 0.0;
    double force = 0.0;
    int used_channel = 0;
};

using Trajectory = std::vector<EvalStep>;

struct EvalSummary {
    double pct_outside_position = 0.0;
    double pct_outside_angle = 0.0;
    double mean_abs_force = 0.0;
    std::vector<double> usage_fraction;  // one entry per critic of the agent
    int episodes = 0;
    std::int64_t steps_counted = 0;
};

struct EpisodeStats {
    int episode = 0;
    int steps = 0;
    double pct_out_pos = 0.0;
    double pct_out_angle = 0.0;
    double mean_abs_force = 0.0;
    std::vector<double> usage;
};

struct Histogram {
    std::vector<double> edges;          // bin i covers [edges[i], edges[i+1])
    std::vector<std::int64_t> counts;   // out-of-range values fold into the end bins
};

/// Pooled Table-1 metrics over all steps of all trajectories: % of steps
/// with the successor state outside each comfort band, mean |force| and the
/// per-critic usage fractions. Throws on zero pooled steps.
EvalSummary compute_metrics(std::span<const Trajectory> trajectories, double position_band,
                            double angle_band, int num_channels);

std::vector<EpisodeStats> per_episode_stats(std::span<const Trajectory> trajectories,
                                            double position_band, double angle_band,
                                            int num_channels);

Histogram make_histogram(std::span<const double> values, std::vector<double> edges);

/// Greedy (epsilon = 0) evaluation episodes; episode e resets the
/// environment with a seed derived from config.seed, identical across
/// agents so controllers face the same initial states.
struct EvalResult {
    EvalSummary summary;
    std::vector<EpisodeStats> per_episode;
    Histogram position_histogram;
    Histogram angle_histogram;
    std::vector<Trajectory> trajectories;
};

EvalResult run_eval(CartPole& env, const LexAgentConfig& agent, const RunConfig& config);

/// Offline training of every critic of the environment, channel 0 first,
/// plus optionally the scalarized-baseline critic. Per-critic seeds derive
/// from config.seed, so the whole bundle is reproducible byte for byte.
struct TrainedCritics {
    std::vector<MlpParameters> critics;
    std::vector<std::vector<EpisodeLog>> critic_logs;
    std::optional<MlpParameters> lagrangian;
    std::vector<EpisodeLog> lagrangian_log;
};

TrainedCritics train_all(CartPole& env, const RunConfig& config, bool with_lagrangian);

/// Behavior restriction for the literal Fig. 2 hierarchical training mode:
/// while critic `channel` trains, actions come from the deepest non-empty
/// constraint set computed with the frozen critics 1..channel-1 and the
/// live online network as Q_channel.
ActionFilterFn hierarchical_filter(const Environment& env,
                                   std::span<const MlpParameters> trained_critics,
                                   std::span<const double> raw_thresholds, int channel,
                                   double gamma);

struct TrainArtifacts {
    std::vector<std::filesystem::path> weight_files;
    std::vector<std::filesystem::path> log_files;
};

/// Trains and persists all critics under config.out_dir (q0.net, q1.net,
/// q2.net, optionally lagrangian.net, plus train_*.csv logs).
TrainArtifacts cmd_train(const RunConfig& config, bool with_lagrangian);

struct EvalArtifacts {
    EvalResult result;
    std::vector<std::filesystem::path> weight_files;
    std::vector<std::uint64_t> weight_checksums;  // fnv1a64, re-verified after the run
    std::filesystem::path episode_csv;
    std::filesystem::path position_csv;
    std::filesystem::path angle_csv;
    std::filesystem::path summary_json;
};

/// Evaluates one controller against the stored weights. `channel` selects
/// the critic in Single mode and is ignored otherwise; `raw_thresholds`
/// overrides config.eval_thresholds in Lex mode when non-empty. Asserts the
/// weight files are unchanged by evaluation (no retraining ever happens).
EvalArtifacts cmd_eval(const RunConfig& config, EvalMode mode, int channel = 0,
                       std::span<const double> raw_thresholds = {});

/// Brute-force report for a tabular MDP: chosen policy, verification that
/// no rival dominates it, feasibility class and per-channel expected costs.
std::string oracle_report(const TabularMdp& mdp, bool all_undominated,
                          std::int64_t budget = 10000);
std::string cmd_oracle(const std::filesystem::path& mdp_file, bool all_undominated,
                       std::int64_t budget = 10000);

std::filesystem::path weight_file_path(const std::filesystem::path& out_dir, int channel);
std::filesystem::path lagrangian_weight_path(const std::filesystem::path& out_dir);

std::uint64_t fnv1a64_file(const std::filesystem::path& path);

void write_episode_csv(const std::filesystem::path& path, std::span<const EpisodeStats> rows);
void write_histogram_csv(const std::filesystem::path& path, const Histogram& histogram);
void write_summary_json(const std::filesystem::path& path, const EvalSummary& summary);

}  // namespace lexrl
