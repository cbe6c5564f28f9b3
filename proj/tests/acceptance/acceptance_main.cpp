// Acceptance gate: every shipped property of the toolkit, one pass/fail
// line each. Returns the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lexrl/harness.hpp"
#include "lexrl/rng.hpp"
#include "support/mc.hpp"
#include "support/random_mdp.hpp"

using namespace lexrl;
namespace ts = lexrl::testsupport;

namespace {

struct Failure {
    std::string message;
};

void expect(bool ok, const std::string& message) {
    if (!ok) {
        throw Failure{message};
    }
}

std::string format(const char* fmt, ...) {
    char buffer[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buffer, sizeof buffer, fmt, args);
    va_end(args);
    return buffer;
}

std::filesystem::path scratch_root() {
    static const std::filesystem::path root = [] {
        const auto path = std::filesystem::temp_directory_path() / "lexrl_acceptance";
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
        return path;
    }();
    return root;
}

// ---------------------------------------------------------------- criterion 1

std::string check_gradients() {
    std::mt19937_64 rng(101);
    // Both production critic shapes plus assorted small ones.
    const std::vector<std::vector<int>> arches = {
        {4, 64, 64, 5}, {4, 64, 16, 5}, {3, 8, 2}, {2, 6, 6, 3}, {5, 12, 4}};
    const double h = 1e-5;
    double worst = 0.0;

    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<int>& widths = arches[static_cast<std::size_t>(trial) % arches.size()];
        MlpParameters net = init_mlp(widths, rng);

        Minibatch batch;
        const int n = 1 + trial % 4;
        batch.features.resize(widths.front(), n);
        for (Eigen::Index i = 0; i < batch.features.size(); ++i) {
            batch.features.data()[i] = uniform_double(rng, -1.0, 1.0);
        }
        for (int i = 0; i < n; ++i) {
            batch.actions.push_back(
                static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(widths.back()))));
            batch.targets.push_back(uniform_double(rng, -1.0, 1.0));
        }

        const MlpGradient analytic = gradient(net, batch);
        const auto fd_error = [&](double& coeff, double analytic_value, double step) {
            const double saved = coeff;
            coeff = saved + step;
            const double up = batch_loss(net, batch);
            coeff = saved - step;
            const double down = batch_loss(net, batch);
            coeff = saved;
            const double fd = (up - down) / (2.0 * step);
            const double scale =
                std::max({std::abs(analytic_value), std::abs(fd), 1e-3});
            return std::abs(fd - analytic_value) / scale;
        };
        const auto check_coeff = [&](double& coeff, double analytic_value) {
            double rel = fd_error(coeff, analytic_value, h);
            if (rel >= 1e-4) {
                // Disambiguate a ReLU kink inside the h-interval from a real
                // gradient bug: only the kink artifact vanishes at smaller h.
                rel = fd_error(coeff, analytic_value, h / 32.0);
            }
            worst = std::max(worst, rel);
        };
        for (std::size_t l = 0; l < net.num_layers(); ++l) {
            for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) {
                check_coeff(net.weights[l].data()[i], analytic.weights[l].data()[i]);
            }
            for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
                check_coeff(net.biases[l].data()[i], analytic.biases[l].data()[i]);
            }
        }
    }
    expect(worst < 1e-4,
           format("max relative gradient error %.3g exceeds 1e-4", worst));
    return format("50 networks, max relative error %.2e", worst);
}

// ---------------------------------------------------------------- criterion 2

struct RandomInstance {
    LexAgentConfig agent;
    std::vector<std::vector<double>> q;  // q[channel][action]
};

RandomInstance random_instance(std::mt19937_64& rng, int max_constraints, int max_actions) {
    const int num_constraints =
        static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_constraints + 1)));
    const int num_actions =
        1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(max_actions)));

    RandomInstance inst;
    inst.agent.num_actions = num_actions;
    for (int c = 0; c <= num_constraints; ++c) {
        std::vector<double> row;
        for (int u = 0; u < num_actions; ++u) {
            row.push_back(uniform_double(rng, -5.0, 5.0));
        }
        inst.q.push_back(row);
    }
    for (int c = 1; c <= num_constraints; ++c) {
        inst.agent.thresholds.push_back(uniform_double(rng, -2.0, 6.0));
    }
    // Occasionally pin a Q value exactly onto its threshold to probe the
    // boundary (Q <= K is satisfied).
    if (num_constraints > 0 && uniform_below(rng, 5) == 0) {
        const int c = 1 + static_cast<int>(
                              uniform_below(rng, static_cast<std::uint64_t>(num_constraints)));
        const int u =
            static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(num_actions)));
        inst.q[static_cast<std::size_t>(c)][static_cast<std::size_t>(u)] =
            inst.agent.thresholds[static_cast<std::size_t>(c - 1)];
    }
    for (const auto& row : inst.q) {
        inst.agent.critics.push_back([row](const StateVector&) { return row; });
    }
    return inst;
}

// Independent selection oracle: score each action by (met count, deciding
// value), pick the strictly best under the three-case ordering.
struct ScoredAction {
    int met = 0;
    double value = 0.0;
};

ScoredAction score_action(const RandomInstance& inst, int u) {
    const int num_constraints = static_cast<int>(inst.agent.thresholds.size());
    ScoredAction s;
    while (s.met < num_constraints &&
           inst.q[static_cast<std::size_t>(s.met + 1)][static_cast<std::size_t>(u)] <=
               inst.agent.thresholds[static_cast<std::size_t>(s.met)]) {
        ++s.met;
    }
    const int deciding = s.met == num_constraints ? 0 : s.met + 1;
    s.value = inst.q[static_cast<std::size_t>(deciding)][static_cast<std::size_t>(u)];
    return s;
}

std::string check_selection_equivalence() {
    std::mt19937_64 rng(202);
    int exercised_constraints = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const RandomInstance inst = random_instance(rng, 3, 6);
        const StateVector state = {0.0};
        const LexSelection got = lex_select_action(state, inst.agent);

        int best = 0;
        ScoredAction best_score = score_action(inst, 0);
        for (int u = 1; u < inst.agent.num_actions; ++u) {
            const ScoredAction s = score_action(inst, u);
            if (s.met > best_score.met ||
                (s.met == best_score.met && s.value < best_score.value)) {
                best = u;
                best_score = s;
            }
        }
        const int num_constraints = static_cast<int>(inst.agent.thresholds.size());
        const int want_channel =
            best_score.met == num_constraints ? 0 : best_score.met + 1;

        expect(got.action == best && got.used_channel == want_channel,
               format("trial %d: lex_select picked (action %d, channel %d), "
                      "exhaustive scoring picked (action %d, channel %d)",
                      trial, got.action, got.used_channel, best, want_channel));
        exercised_constraints = std::max(exercised_constraints, num_constraints);
    }
    return format("1000 instances matched (C up to %d)", exercised_constraints);
}

// ---------------------------------------------------------------- criterion 3

bool is_subset(const std::vector<int>& inner, const std::vector<int>& outer) {
    return std::all_of(inner.begin(), inner.end(), [&](int u) {
        return std::find(outer.begin(), outer.end(), u) != outer.end();
    });
}

std::string check_action_set_properties() {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 10000; ++trial) {
        RandomInstance inst = random_instance(rng, 3, 6);
        if (inst.agent.thresholds.empty()) {
            inst.agent.thresholds.push_back(uniform_double(rng, -2.0, 6.0));
            std::vector<double> row;
            for (int u = 0; u < inst.agent.num_actions; ++u) {
                row.push_back(uniform_double(rng, -5.0, 5.0));
            }
            inst.q.push_back(row);
            inst.agent.critics.push_back([row](const StateVector&) { return row; });
        }
        const int num_constraints = static_cast<int>(inst.agent.thresholds.size());
        const StateVector state = {0.0};

        const ConstraintActionSets sets = constraint_action_sets(state, inst.agent);
        expect(sets.v >= 0 && sets.v <= num_constraints, "v outside [0, C]");
        const std::size_t expected_sets =
            sets.v < num_constraints ? static_cast<std::size_t>(sets.v) + 1
                                     : static_cast<std::size_t>(num_constraints);
        expect(sets.sets.size() == expected_sets, "stored set count is off");
        for (std::size_t c = 0; c < sets.sets.size(); ++c) {
            if (c + 1 < sets.sets.size()) {
                expect(!sets.sets[c].empty(), "a set before the stop is empty");
                expect(is_subset(sets.sets[c + 1], sets.sets[c]),
                       format("trial %d: A_%zu is not nested in A_%zu", trial, c + 2, c + 1));
            }
        }
        if (sets.v < num_constraints) {
            expect(sets.sets.back().empty(), "the stopping set must be empty");
        } else if (!sets.sets.empty()) {
            expect(!sets.sets.back().empty(), "A_C must be non-empty when v = C");
        }

        // Raising every threshold can only deepen the satisfied prefix and
        // widen each retained set.
        LexAgentConfig relaxed = inst.agent;
        for (double& k : relaxed.thresholds) {
            k += 1.0;
        }
        const ConstraintActionSets wider = constraint_action_sets(state, relaxed);
        expect(wider.v >= sets.v, format("trial %d: relaxing thresholds shrank v", trial));
        const std::size_t common = std::min(sets.sets.size(), wider.sets.size());
        for (std::size_t c = 0; c < common; ++c) {
            expect(is_subset(sets.sets[c], wider.sets[c]),
                   format("trial %d: relaxing thresholds dropped an action from A_%zu",
                          trial, c + 1));
        }

        // Infinite thresholds reduce the rule to a plain greedy argmin on Q_0.
        LexAgentConfig unconstrained = inst.agent;
        for (double& k : unconstrained.thresholds) {
            k = std::numeric_limits<double>::infinity();
        }
        const ConstraintActionSets full = constraint_action_sets(state, unconstrained);
        expect(full.v == num_constraints, "infinite thresholds must satisfy every level");
        for (const auto& set : full.sets) {
            expect(static_cast<int>(set.size()) == inst.agent.num_actions,
                   "infinite thresholds must keep every action");
        }
        const LexSelection pick = lex_select_action(state, unconstrained);
        const auto& q0 = inst.q[0];
        const int greedy = static_cast<int>(
            std::min_element(q0.begin(), q0.end()) - q0.begin());
        expect(pick.action == greedy && pick.used_channel == 0,
               format("trial %d: infinite-threshold selection is not greedy argmin", trial));
    }
    return "nesting, monotonicity and the greedy reduction held on 10000 draws";
}

// ---------------------------------------------------------------- criterion 4

std::string check_oracle_property() {
    std::mt19937_64 rng(404);
    int feasible_runs = 0;
    for (int trial = 0; trial < 24; ++trial) {
        ts::RandomMdpOptions opt;
        opt.num_states = 2 + static_cast<int>(uniform_below(rng, 4));   // 2..5
        opt.num_actions = 2 + static_cast<int>(uniform_below(rng, 2));  // 2..3
        opt.num_constraints = static_cast<int>(uniform_below(rng, 3));  // 0..2
        opt.gamma = 0.85;
        const TabularMdp mdp = ts::random_mdp(opt, rng);

        const BruteForceResult result = brute_force_lex_optimal(mdp, 100000, true);

        DeterministicPolicy rival(static_cast<std::size_t>(mdp.num_states), 0);
        bool any_per_state_feasible = false;
        bool dominated = false;
        bool more = true;
        while (more) {
            if (feasibility_check(mdp, rival) == FeasibilityClass::FeasibleFor10) {
                any_per_state_feasible = true;
            }
            if (rival != result.policy) {
                bool weakly = true;
                bool strictly = false;
                for (int s = 0; s < mdp.num_states && weakly; ++s) {
                    const LexOrdering ord = lex_compare(mdp, rival, result.policy, s);
                    weakly = ord != LexOrdering::Worse;
                    strictly = strictly || ord == LexOrdering::Better;
                }
                dominated = dominated || (weakly && strictly);
            }
            more = false;
            for (std::size_t i = rival.size(); i-- > 0;) {
                if (++rival[i] < mdp.num_actions) {
                    more = true;
                    break;
                }
                rival[i] = 0;
            }
        }
        expect(!dominated, format("MDP %d: returned policy is dominated", trial));
        if (any_per_state_feasible && mdp.num_constraints > 0) {
            expect(feasibility_check(mdp, result.policy) == FeasibilityClass::FeasibleFor10,
                   format("MDP %d: per-state feasible set non-empty but the returned "
                          "policy misses a per-state constraint",
                          trial));
            ++feasible_runs;
        }
    }
    expect(feasible_runs > 0, "no generated MDP exercised the feasible branch");
    return format("24 MDPs undominated; %d had a per-state-feasible optimum", feasible_runs);
}

// ---------------------------------------------------------------- criterion 5

std::string check_mc_agreement() {
    std::mt19937_64 rng(505);
    int checks = 0;
    double worst_sigma = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        ts::RandomMdpOptions opt;
        opt.gamma = 0.8;
        const TabularMdp mdp = ts::random_mdp(opt, rng);
        DeterministicPolicy policy;
        for (int s = 0; s < mdp.num_states; ++s) {
            policy.push_back(static_cast<int>(
                uniform_below(rng, static_cast<std::uint64_t>(mdp.num_actions))));
        }
        const int channel =
            static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(
                                                    mdp.num_constraints + 1)));
        const Eigen::MatrixXd q = policy_q_values(mdp, policy, channel);
        for (int s = 0; s < mdp.num_states; ++s) {
            for (int u = 0; u < mdp.num_actions; ++u) {
                const ts::McEstimate est =
                    ts::mc_q_estimate(mdp, policy, channel, s, u, 20000, rng);
                const double gap = std::abs(q(s, u) - est.mean);
                const double sigmas =
                    est.standard_error > 0.0 ? gap / est.standard_error : 0.0;
                worst_sigma = std::max(worst_sigma, sigmas);
                expect(gap <= 3.0 * est.standard_error + 1e-9,
                       format("MDP %d channel %d (s=%d, u=%d): exact %.6f vs MC "
                              "%.6f +- %.6f",
                              trial, channel, s, u, q(s, u), est.mean,
                              est.standard_error));
                ++checks;
            }
        }
    }
    return format("%d state-action pairs within 3 SE (worst %.2f SE)", checks, worst_sigma);
}

// ---------------------------------------------------------------- criterion 6

struct BenchmarkOutcome {
    EvalArtifacts lex5;
    EvalArtifacts lex15;
};

std::optional<BenchmarkOutcome> g_benchmark;

std::string check_cartpole_reproduction() {
    RunConfig config;
    config.out_dir = scratch_root() / "bench";
    config.seed = 1;
    // The paper states its learning rate against an unspecified loss
    // normalization; with this codebase's minibatch-mean loss the critics
    // need a larger step to converge within the 400-episode budget.
    config.trainer.schedules.base_lr = 2e-3;

    cmd_train(config, false);

    const EvalArtifacts j0 = cmd_eval(config, EvalMode::Single, 0);
    const EvalArtifacts j1 = cmd_eval(config, EvalMode::Single, 1);
    const EvalArtifacts j2 = cmd_eval(config, EvalMode::Single, 2);
    const std::vector<double> k5 = {0.05, 0.05};
    const std::vector<double> k15 = {0.15, 0.15};
    EvalArtifacts lex5 = cmd_eval(config, EvalMode::Lex, 0, k5);
    EvalArtifacts lex15 = cmd_eval(config, EvalMode::Lex, 0, k15);

    const EvalSummary& s0 = j0.result.summary;
    const EvalSummary& s1 = j1.result.summary;
    const EvalSummary& s2 = j2.result.summary;
    const EvalSummary& s5 = lex5.result.summary;
    const EvalSummary& s15 = lex15.result.summary;

    expect(s1.pct_outside_angle <= 5.0,
           format("J1 angle violation %.2f%% exceeds 5%%", s1.pct_outside_angle));
    expect(s2.pct_outside_position <= 5.0,
           format("J2 position violation %.2f%% exceeds 5%%", s2.pct_outside_position));
    expect(s2.mean_abs_force > s0.mean_abs_force && s2.mean_abs_force > s1.mean_abs_force,
           format("J2 mean force %.2f N is not the largest single-channel force "
                  "(J0 %.2f, J1 %.2f)",
                  s2.mean_abs_force, s0.mean_abs_force, s1.mean_abs_force));
    expect(s5.pct_outside_angle <= 5.0 && s5.pct_outside_position <= 5.0,
           format("Lex(5) violations %.2f%% / %.2f%% exceed 5%%", s5.pct_outside_angle,
                  s5.pct_outside_position));
    expect(s15.pct_outside_angle <= 15.0 && s15.pct_outside_position <= 15.0,
           format("Lex(15) violations %.2f%% / %.2f%% exceed 15%%", s15.pct_outside_angle,
                  s15.pct_outside_position));
    expect(s0.mean_abs_force < s15.mean_abs_force,
           format("force ordering broken: J0 %.3f N !< Lex(15) %.3f N", s0.mean_abs_force,
                  s15.mean_abs_force));
    expect(s15.mean_abs_force <= s5.mean_abs_force * 1.10,
           format("force ordering broken: Lex(15) %.3f N > 1.10 x Lex(5) %.3f N",
                  s15.mean_abs_force, s5.mean_abs_force));
    expect(s5.mean_abs_force < s2.mean_abs_force,
           format("force ordering broken: Lex(5) %.3f N !< J2 %.3f N", s5.mean_abs_force,
                  s2.mean_abs_force));

    g_benchmark = BenchmarkOutcome{std::move(lex5), std::move(lex15)};
    return format("J1 angle %.1f%%, J2 pos %.1f%%, Lex(5) %.1f/%.1f%%, "
                  "Lex(15) %.1f/%.1f%%, forces %.2f < %.2f <= %.2f < %.2f N",
                  s1.pct_outside_angle, s2.pct_outside_position, s5.pct_outside_angle,
                  s5.pct_outside_position, s15.pct_outside_angle, s15.pct_outside_position,
                  s0.mean_abs_force, s15.mean_abs_force, s5.mean_abs_force,
                  s2.mean_abs_force);
}

// ---------------------------------------------------------------- criterion 7

std::string check_no_retrain() {
    expect(g_benchmark.has_value(), "benchmark artifacts missing (criterion 6 did not run)");
    const BenchmarkOutcome& bench = *g_benchmark;
    expect(bench.lex5.weight_files == bench.lex15.weight_files,
           "Lex(5) and Lex(15) read different weight files");
    expect(bench.lex5.weight_checksums == bench.lex15.weight_checksums,
           "weight checksums differ between the two lex evaluations");
    for (std::size_t i = 0; i < bench.lex5.weight_files.size(); ++i) {
        expect(fnv1a64_file(bench.lex5.weight_files[i]) == bench.lex5.weight_checksums[i],
               "weight file changed after the evaluations");
    }
    return format("%zu weight files byte-identical across Lex(5) and Lex(15)",
                  bench.lex5.weight_files.size());
}

// ---------------------------------------------------------------- criterion 8

std::string check_determinism() {
    const auto run = [](const std::filesystem::path& out_dir) {
        RunConfig config;
        config.trainer.episodes = 30;
        config.eval_episodes = 10;
        config.out_dir = out_dir;
        config.seed = 77;
        const TrainArtifacts trained = cmd_train(config, true);
        const EvalArtifacts eval = cmd_eval(config, EvalMode::Lex);
        return std::pair{trained, eval};
    };
    const auto [train_a, eval_a] = run(scratch_root() / "det_a");
    const auto [train_b, eval_b] = run(scratch_root() / "det_b");

    expect(train_a.weight_files.size() == train_b.weight_files.size(),
           "weight file counts differ");
    for (std::size_t i = 0; i < train_a.weight_files.size(); ++i) {
        expect(fnv1a64_file(train_a.weight_files[i]) == fnv1a64_file(train_b.weight_files[i]),
               format("weight file %s differs between same-seed runs",
                      train_a.weight_files[i].filename().string().c_str()));
    }
    const auto same_bytes = [](const std::filesystem::path& a,
                               const std::filesystem::path& b) {
        return fnv1a64_file(a) == fnv1a64_file(b);
    };
    expect(same_bytes(eval_a.summary_json, eval_b.summary_json),
           "summary JSON differs between same-seed runs");
    expect(same_bytes(eval_a.episode_csv, eval_b.episode_csv),
           "episode CSV differs between same-seed runs");
    expect(same_bytes(eval_a.position_csv, eval_b.position_csv),
           "position histogram differs between same-seed runs");
    expect(same_bytes(eval_a.angle_csv, eval_b.angle_csv),
           "angle histogram differs between same-seed runs");
    return format("%zu weight files and all eval artifacts byte-identical",
                  train_a.weight_files.size());
}

struct Criterion {
    int id;
    const char* name;
    double runtime_limit_s;
    std::function<std::string()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "gradient correctness", 60.0, check_gradients},
        {2, "lexicographic selection equivalence", 0.0, check_selection_equivalence},
        {3, "action-set properties", 0.0, check_action_set_properties},
        {4, "oracle undominated + feasibility", 300.0, check_oracle_property},
        {5, "exact vs Monte-Carlo values", 0.0, check_mc_agreement},
        {6, "cart-pole reproduction", 0.0, check_cartpole_reproduction},
        {7, "no-retrain checksum equality", 0.0, check_no_retrain},
        {8, "same-seed determinism", 0.0, check_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool passed = false;
        try {
            detail = criterion.run();
            passed = true;
        } catch (const Failure& failure) {
            detail = failure.message;
        } catch (const std::exception& error) {
            detail = std::string("unexpected error: ") + error.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (passed && criterion.runtime_limit_s > 0.0 &&
            elapsed > criterion.runtime_limit_s) {
            passed = false;
            detail = format("finished but took %.1f s (limit %.0f s)", elapsed,
                            criterion.runtime_limit_s);
        }
        std::printf("criterion %d (%s): %s — %s (%.1f s)\n", criterion.id, criterion.name,
                    passed ? "PASS" : "FAIL", detail.c_str(), elapsed);
        std::fflush(stdout);
        failures += passed ? 0 : 1;
    }
    return failures;
}
