#include "lexrl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "lexrl/errors.hpp"
#include "lexrl/rng.hpp"
#include "lexrl/text.hpp"

namespace lexrl {

namespace {

// Seed streams hanging off RunConfig::seed.
enum : std::uint64_t { kCriticStream = 10, kLagrangianStream = 20, kEvalStream = 30 };

struct StepTallies {
    std::int64_t steps = 0;
    std::int64_t outside_position = 0;
    std::int64_t outside_angle = 0;
    double abs_force_sum = 0.0;
    std::vector<std::int64_t> usage;
};

StepTallies tally(std::span<const Trajectory> trajectories, double position_band,
                  double angle_band, int num_channels) {
    if (num_channels < 1) {
        throw std::invalid_argument("metrics: num_channels must be positive");
    }
    StepTallies t;
    t.usage.assign(static_cast<std::size_t>(num_channels), 0);
    for (const Trajectory& trajectory : trajectories) {
        for (const EvalStep& step : trajectory) {
            ++t.steps;
            t.outside_position += std::abs(step.position) > position_band ? 1 : 0;
            t.outside_angle += std::abs(step.angle) > angle_band ? 1 : 0;
            t.abs_force_sum += std::abs(step.force);
            if (step.used_channel < 0 || step.used_channel >= num_channels) {
                throw std::out_of_range("metrics: used_channel outside the critic range");
            }
            ++t.usage[static_cast<std::size_t>(step.used_channel)];
        }
    }
    return t;
}

EvalSummary summarize(const StepTallies& t, int episodes) {
    EvalSummary s;
    s.episodes = episodes;
    s.steps_counted = t.steps;
    s.pct_outside_position = 100.0 * static_cast<double>(t.outside_position) /
                             static_cast<double>(t.steps);
    s.pct_outside_angle =
        100.0 * static_cast<double>(t.outside_angle) / static_cast<double>(t.steps);
    s.mean_abs_force = t.abs_force_sum / static_cast<double>(t.steps);
    s.usage_fraction.reserve(t.usage.size());
    for (std::int64_t count : t.usage) {
        s.usage_fraction.push_back(static_cast<double>(count) / static_cast<double>(t.steps));
    }
    return s;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

std::string threshold_tag(std::span<const double> raw_thresholds) {
    std::string tag = "lex";
    for (double k : raw_thresholds) {
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%g", k);
        tag += "_";
        tag += buffer;
    }
    return tag;
}

const char* feasibility_name(FeasibilityClass value) {
    switch (value) {
        case FeasibilityClass::FeasibleFor10:
            return "feasible_for_10";
        case FeasibilityClass::FeasibleFor6Only:
            return "feasible_for_6_only";
        default:
            return "infeasible";
    }
}

std::string policy_to_string(const DeterministicPolicy& policy) {
    std::string out;
    for (std::size_t i = 0; i < policy.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += std::to_string(policy[i]);
    }
    return out;
}

}  // namespace

EvalSummary compute_metrics(std::span<const Trajectory> trajectories, double position_band,
                            double angle_band, int num_channels) {
    const StepTallies t = tally(trajectories, position_band, angle_band, num_channels);
    if (t.steps == 0) {
        throw std::invalid_argument("compute_metrics: no steps to pool");
    }
    return summarize(t, static_cast<int>(trajectories.size()));
}

std::vector<EpisodeStats> per_episode_stats(std::span<const Trajectory> trajectories,
                                            double position_band, double angle_band,
                                            int num_channels) {
    std::vector<EpisodeStats> rows;
    rows.reserve(trajectories.size());
    for (std::size_t e = 0; e < trajectories.size(); ++e) {
        const StepTallies t =
            tally(trajectories.subspan(e, 1), position_band, angle_band, num_channels);
        EpisodeStats row;
        row.episode = static_cast<int>(e) + 1;
        row.steps = static_cast<int>(t.steps);
        if (t.steps > 0) {
            const EvalSummary s = summarize(t, 1);
            row.pct_out_pos = s.pct_outside_position;
            row.pct_out_angle = s.pct_outside_angle;
            row.mean_abs_force = s.mean_abs_force;
            row.usage = s.usage_fraction;
        } else {
            row.usage.assign(static_cast<std::size_t>(num_channels), 0.0);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Histogram make_histogram(std::span<const double> values, std::vector<double> edges) {
    if (edges.size() < 2) {
        throw std::invalid_argument("make_histogram: needs at least two bin edges");
    }
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i] < edges[i + 1])) {
            throw std::invalid_argument("make_histogram: edges must be strictly increasing");
        }
    }
    Histogram h;
    h.counts.assign(edges.size() - 1, 0);
    for (double v : values) {
        const auto it = std::upper_bound(edges.begin(), edges.end(), v);
        std::ptrdiff_t bin = (it - edges.begin()) - 1;
        bin = std::clamp<std::ptrdiff_t>(bin, 0,
                                         static_cast<std::ptrdiff_t>(h.counts.size()) - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    h.edges = std::move(edges);
    return h;
}

EvalResult run_eval(CartPole& env, const LexAgentConfig& agent, const RunConfig& config) {
    config.validate();
    agent.validate();
    if (agent.num_actions != env.num_actions()) {
        throw std::invalid_argument("run_eval: agent/environment action counts differ");
    }

    EvalResult result;
    result.trajectories.reserve(static_cast<std::size_t>(config.eval_episodes));
    for (int episode = 1; episode <= config.eval_episodes; ++episode) {
        StateVector state =
            env.reset(derive_seed(config.seed, kEvalStream, static_cast<std::uint64_t>(episode)));
        Trajectory trajectory;
        for (int step = 1; step <= config.trainer.steps_per_episode; ++step) {
            if (env.is_terminal(state)) {
                break;
            }
            const LexSelection selection = lex_select_action(state, agent);
            StepOutcome outcome = env.step(state, selection.action);
            trajectory.push_back({outcome.next_state[0], outcome.next_state[2],
                                  env.force_for(selection.action), selection.used_channel});
            if (outcome.terminal) {
                break;
            }
            state = std::move(outcome.next_state);
        }
        result.trajectories.push_back(std::move(trajectory));
    }

    const int channels = static_cast<int>(agent.critics.size());
    result.summary = compute_metrics(result.trajectories, config.cartpole.position_band,
                                     config.cartpole.angle_band, channels);
    result.per_episode = per_episode_stats(result.trajectories, config.cartpole.position_band,
                                           config.cartpole.angle_band, channels);

    std::vector<double> positions;
    std::vector<double> angles;
    positions.reserve(static_cast<std::size_t>(result.summary.steps_counted));
    angles.reserve(static_cast<std::size_t>(result.summary.steps_counted));
    for (const Trajectory& trajectory : result.trajectories) {
        for (const EvalStep& step : trajectory) {
            positions.push_back(step.position);
            angles.push_back(step.angle);
        }
    }
    result.position_histogram = make_histogram(positions, config.position_bin_edges);
    result.angle_histogram = make_histogram(angles, config.angle_bin_edges);
    return result;
}

ActionFilterFn hierarchical_filter(const Environment& env,
                                   std::span<const MlpParameters> trained_critics,
                                   std::span<const double> raw_thresholds, int channel,
                                   double gamma) {
    if (channel < 1 || channel > env.num_constraints()) {
        throw std::out_of_range("hierarchical_filter: channel must name a constraint critic");
    }
    if (static_cast<int>(trained_critics.size()) < channel) {
        throw std::invalid_argument("hierarchical_filter: critics 0.." +
                                    std::to_string(channel - 1) + " must already be trained");
    }
    if (static_cast<int>(raw_thresholds.size()) < channel) {
        throw std::invalid_argument("hierarchical_filter: need a threshold per constraint");
    }

    // Frozen constraint critics Q_1..Q_{channel-1}; the live network joins
    // per call as Q_channel.
    std::vector<CriticFn> frozen;
    for (int c = 1; c < channel; ++c) {
        frozen.push_back(network_critic(env, trained_critics[static_cast<std::size_t>(c)], c));
    }
    std::vector<double> bounds;
    for (int c = 1; c <= channel; ++c) {
        bounds.push_back(discount_threshold(raw_thresholds[static_cast<std::size_t>(c - 1)],
                                            gamma));
    }

    const Environment* bound_env = &env;
    return [bound_env, frozen, bounds, channel](const StateVector& state,
                                                const MlpParameters& online) {
        LexAgentConfig cfg;
        cfg.num_actions = bound_env->num_actions();
        cfg.thresholds = bounds;
        cfg.critics.emplace_back();  // Q_0 slot, never consulted by the set computation
        for (const CriticFn& fn : frozen) {
            cfg.critics.push_back(fn);
        }
        cfg.critics.push_back([bound_env, channel, &online](const StateVector& s) {
            const std::vector<double> features = bound_env->features(channel, s);
            const Eigen::VectorXd q = forward_one(
                online, Eigen::Map<const Eigen::VectorXd>(
                            features.data(), static_cast<Eigen::Index>(features.size())));
            return std::vector<double>(q.data(), q.data() + q.size());
        });
        const ConstraintActionSets sets = constraint_action_sets(state, cfg);
        if (sets.v == 0) {
            return std::vector<int>{};  // deepest non-empty set is A_0: no restriction
        }
        return sets.sets[static_cast<std::size_t>(sets.v - 1)];
    };
}

TrainedCritics train_all(CartPole& env, const RunConfig& config, bool with_lagrangian) {
    config.validate();
    if (config.hierarchical_training &&
        static_cast<int>(config.eval_thresholds.size()) != env.num_constraints()) {
        throw std::invalid_argument(
            "train_all: hierarchical training needs one threshold per constraint");
    }

    TrainedCritics out;
    for (int c = 0; c <= env.num_constraints(); ++c) {
        const NetworkArchitecture arch =
            c == 0 ? primary_critic_arch(env.state_dim(), env.num_actions())
                   : constraint_critic_arch(env.state_dim(), env.num_actions());
        TrainerConfig trainer = config.trainer;
        trainer.seed = derive_seed(config.seed, kCriticStream + static_cast<std::uint64_t>(c));

        ActionFilterFn filter;
        if (config.hierarchical_training && c >= 1) {
            filter = hierarchical_filter(env, out.critics, config.eval_thresholds, c,
                                         config.trainer.gamma);
        }
        TrainResult trained =
            train_critic(env, c, channel_cost(env, c), arch, trainer, filter);
        out.critics.push_back(std::move(trained.online));
        out.critic_logs.push_back(std::move(trained.log));
    }

    if (with_lagrangian) {
        if (static_cast<int>(config.lagrangian_weights.size()) != env.num_constraints() + 1) {
            throw std::invalid_argument("train_all: need one Lagrangian weight per channel");
        }
        TrainerConfig trainer = config.trainer;
        trainer.seed = derive_seed(config.seed, kLagrangianStream);
        TrainResult trained = train_critic(
            env, 0, scalarized_cost(env, config.lagrangian_weights),
            constraint_critic_arch(env.state_dim(), env.num_actions()), trainer);
        out.lagrangian = std::move(trained.online);
        out.lagrangian_log = std::move(trained.log);
    }
    return out;
}

std::filesystem::path weight_file_path(const std::filesystem::path& out_dir, int channel) {
    return out_dir / ("q" + std::to_string(channel) + ".net");
}

std::filesystem::path lagrangian_weight_path(const std::filesystem::path& out_dir) {
    return out_dir / "lagrangian.net";
}

TrainArtifacts cmd_train(const RunConfig& config, bool with_lagrangian) {
    config.validate();
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + config.out_dir.string() + ": " +
                      ec.message());
    }

    CartPole env(config.cartpole);
    TrainedCritics trained = train_all(env, config, with_lagrangian);

    TrainArtifacts artifacts;
    for (std::size_t c = 0; c < trained.critics.size(); ++c) {
        const auto weights = weight_file_path(config.out_dir, static_cast<int>(c));
        const auto log = config.out_dir / ("train_q" + std::to_string(c) + ".csv");
        save_network(trained.critics[c], weights);
        write_training_log(log, trained.critic_logs[c]);
        artifacts.weight_files.push_back(weights);
        artifacts.log_files.push_back(log);
    }
    if (trained.lagrangian) {
        const auto weights = lagrangian_weight_path(config.out_dir);
        const auto log = config.out_dir / "train_lagrangian.csv";
        save_network(*trained.lagrangian, weights);
        write_training_log(log, trained.lagrangian_log);
        artifacts.weight_files.push_back(weights);
        artifacts.log_files.push_back(log);
    }
    return artifacts;
}

EvalArtifacts cmd_eval(const RunConfig& config, EvalMode mode, int channel,
                       std::span<const double> raw_thresholds) {
    config.validate();
    CartPole env(config.cartpole);

    EvalArtifacts artifacts;
    LexAgentConfig agent;
    std::string tag;

    switch (mode) {
        case EvalMode::Single: {
            if (channel < 0 || channel > env.num_constraints()) {
                throw std::out_of_range("cmd_eval: channel outside [0, " +
                                        std::to_string(env.num_constraints()) + "]");
            }
            artifacts.weight_files.push_back(weight_file_path(config.out_dir, channel));
            MlpParameters params = load_network(artifacts.weight_files[0]);
            agent = make_agent({network_critic(env, std::move(params), channel)}, {},
                               config.trainer.gamma, env.num_actions());
            tag = "q" + std::to_string(channel);
            break;
        }
        case EvalMode::Lex: {
            const std::vector<double> raw =
                raw_thresholds.empty()
                    ? config.eval_thresholds
                    : std::vector<double>(raw_thresholds.begin(), raw_thresholds.end());
            if (static_cast<int>(raw.size()) != env.num_constraints()) {
                throw std::invalid_argument("cmd_eval: need exactly " +
                                            std::to_string(env.num_constraints()) +
                                            " thresholds, got " + std::to_string(raw.size()));
            }
            std::vector<MlpParameters> critics;
            for (int c = 0; c <= env.num_constraints(); ++c) {
                artifacts.weight_files.push_back(weight_file_path(config.out_dir, c));
                critics.push_back(load_network(artifacts.weight_files.back()));
            }
            agent = make_agent(env, critics, raw, config.trainer.gamma);
            tag = threshold_tag(raw);
            break;
        }
        case EvalMode::Lagrangian: {
            artifacts.weight_files.push_back(lagrangian_weight_path(config.out_dir));
            MlpParameters params = load_network(artifacts.weight_files[0]);
            agent = make_agent({network_critic(env, std::move(params), 0)}, {},
                               config.trainer.gamma, env.num_actions());
            tag = "lagrangian";
            break;
        }
    }

    for (const auto& file : artifacts.weight_files) {
        artifacts.weight_checksums.push_back(fnv1a64_file(file));
    }

    artifacts.result = run_eval(env, agent, config);

    // Remark 2 contract: evaluation must never touch the weight files.
    for (std::size_t i = 0; i < artifacts.weight_files.size(); ++i) {
        if (fnv1a64_file(artifacts.weight_files[i]) != artifacts.weight_checksums[i]) {
            throw std::logic_error("cmd_eval: weight file " +
                                   artifacts.weight_files[i].string() +
                                   " changed during evaluation");
        }
    }

    // Per-episode usage expanded to one column per environment critic; the
    // single consulted critic occupies its own column (the scalarized critic
    // reports as column 0).
    std::vector<EpisodeStats> csv_rows = artifacts.result.per_episode;
    if (mode != EvalMode::Lex) {
        const std::size_t columns = static_cast<std::size_t>(env.num_constraints()) + 1;
        const std::size_t hot = mode == EvalMode::Single ? static_cast<std::size_t>(channel) : 0;
        for (EpisodeStats& row : csv_rows) {
            const double used = row.steps > 0 ? 1.0 : 0.0;
            row.usage.assign(columns, 0.0);
            row.usage[hot] = used;
        }
    }

    artifacts.episode_csv = config.out_dir / ("eval_" + tag + "_episodes.csv");
    artifacts.position_csv = config.out_dir / ("eval_" + tag + "_position_hist.csv");
    artifacts.angle_csv = config.out_dir / ("eval_" + tag + "_angle_hist.csv");
    artifacts.summary_json = config.out_dir / ("eval_" + tag + "_summary.json");

    write_episode_csv(artifacts.episode_csv, csv_rows);
    write_histogram_csv(artifacts.position_csv, artifacts.result.position_histogram);
    write_histogram_csv(artifacts.angle_csv, artifacts.result.angle_histogram);
    write_summary_json(artifacts.summary_json, artifacts.result.summary);
    return artifacts;
}

std::string oracle_report(const TabularMdp& mdp, bool all_undominated, std::int64_t budget) {
    const BruteForceResult search = brute_force_lex_optimal(mdp, budget, true);

    const bool undominated_verified =
        std::find(search.undominated.begin(), search.undominated.end(), search.policy) !=
        search.undominated.end();

    std::ostringstream out;
    out << "states: " << mdp.num_states << '\n';
    out << "actions: " << mdp.num_actions << '\n';
    out << "constraints: " << mdp.num_constraints << '\n';
    out << "gamma: " << format_double(mdp.gamma) << '\n';
    out << "policies_searched: " << search.policies_searched << '\n';
    out << "policy: " << policy_to_string(search.policy) << '\n';
    out << "strongly_optimal: " << (search.strongly_optimal ? "yes" : "no") << '\n';
    out << "undominated_verified: " << (undominated_verified ? "yes" : "no") << '\n';
    out << "feasibility: " << feasibility_name(feasibility_check(mdp, search.policy)) << '\n';
    for (int c = 0; c <= mdp.num_constraints; ++c) {
        out << "expected_cost[" << c
            << "]: " << format_double(expected_cost(mdp, search.policy, c)) << '\n';
    }
    if (all_undominated) {
        out << "undominated_count: " << search.undominated.size() << '\n';
        for (const DeterministicPolicy& policy : search.undominated) {
            out << "undominated: " << policy_to_string(policy) << '\n';
        }
    }
    return out.str();
}

std::string cmd_oracle(const std::filesystem::path& mdp_file, bool all_undominated,
                       std::int64_t budget) {
    return oracle_report(load_tabular_mdp(mdp_file), all_undominated, budget);
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    std::uint64_t hash = 14695981039346656037ULL;
    char buffer[4096];
    while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 1099511628211ULL;
        }
    }
    return hash;
}

void write_episode_csv(const std::filesystem::path& path, std::span<const EpisodeStats> rows) {
    std::ofstream out = open_for_write(path);
    const std::size_t usage_columns = rows.empty() ? 0 : rows[0].usage.size();
    out << "episode,steps,pct_out_pos,pct_out_angle,mean_abs_force";
    for (std::size_t c = 0; c < usage_columns; ++c) {
        out << ",usage_q" << c;
    }
    out << '\n';
    for (const EpisodeStats& row : rows) {
        out << row.episode << ',' << row.steps << ',' << format_double(row.pct_out_pos) << ','
            << format_double(row.pct_out_angle) << ',' << format_double(row.mean_abs_force);
        for (double u : row.usage) {
            out << ',' << format_double(u);
        }
        out << '\n';
    }
    finish_write(out, path);
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& histogram) {
    std::ofstream out = open_for_write(path);
    std::int64_t total = 0;
    for (std::int64_t count : histogram.counts) {
        total += count;
    }
    out << "bin_low,bin_high,count,fraction\n";
    for (std::size_t i = 0; i < histogram.counts.size(); ++i) {
        const double fraction =
            total > 0 ? static_cast<double>(histogram.counts[i]) / static_cast<double>(total)
                      : 0.0;
        out << format_double(histogram.edges[i]) << ',' << format_double(histogram.edges[i + 1])
            << ',' << histogram.counts[i] << ',' << format_double(fraction) << '\n';
    }
    finish_write(out, path);
}

void write_summary_json(const std::filesystem::path& path, const EvalSummary& summary) {
    nlohmann::json j;
    j["pct_outside_position"] = summary.pct_outside_position;
    j["pct_outside_angle"] = summary.pct_outside_angle;
    j["mean_abs_force"] = summary.mean_abs_force;
    j["usage_fraction"] = summary.usage_fraction;
    j["episodes"] = summary.episodes;
    j["steps_counted"] = summary.steps_counted;
    std::ofstream out = open_for_write(path);
    out << j.dump(2) << '\n';
    finish_write(out, path);
}

}  // namespace lexrl
