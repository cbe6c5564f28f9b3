#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "lexrl.h"

namespace {

struct ConfigDeleter {
    void operator()(lexrl_config* config) const { lexrl_config_free(config); }
};
using ConfigHandle = std::unique_ptr<lexrl_config, ConfigDeleter>;

int fail(lexrl_status status) {
    std::fprintf(stderr, "error: %s\n", lexrl_last_error());
    return static_cast<int>(status);
}

lexrl_status make_config(const std::string& config_path, const std::string& out_dir,
                         std::uint64_t seed, bool seed_set, ConfigHandle& handle) {
    lexrl_config* raw = nullptr;
    const lexrl_status status = config_path.empty()
                                    ? lexrl_config_default(&raw)
                                    : lexrl_config_load(config_path.c_str(), &raw);
    if (status != LEXRL_OK) {
        return status;
    }
    handle.reset(raw);
    if (!out_dir.empty()) {
        if (const lexrl_status bad = lexrl_config_set_out_dir(raw, out_dir.c_str())) {
            return bad;
        }
    }
    if (seed_set) {
        if (const lexrl_status bad = lexrl_config_set_seed(raw, seed)) {
            return bad;
        }
    }
    return LEXRL_OK;
}

std::vector<double> parse_thresholds(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size() && !text.empty()) {
        const std::size_t comma = text.find(',', start);
        const std::string piece =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        values.push_back(std::stod(piece));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return values;
}

void print_summary(const lexrl_eval_summary& summary) {
    std::printf("pct_outside_position: %g\n", summary.pct_outside_position);
    std::printf("pct_outside_angle: %g\n", summary.pct_outside_angle);
    std::printf("mean_abs_force: %g\n", summary.mean_abs_force);
    std::printf("usage:");
    for (int32_t i = 0; i < summary.usage_count; ++i) {
        std::printf(" %g", summary.usage_fraction[i]);
    }
    std::printf("\n");
    std::printf("episodes: %d\n", summary.episodes);
    std::printf("steps_counted: %lld\n", static_cast<long long>(summary.steps_counted));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lexicographic deep-RL toolkit: critic training, controller "
                 "evaluation and the tabular oracle"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file");
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seed", seed, "master seed override")
            ->each([&](const std::string&) { seed_set = true; });
    };

    auto* train = app.add_subcommand("train", "train the per-channel critics offline");
    bool with_lagrangian = false;
    add_common(train);
    train->add_flag("--with-lagrangian", with_lagrangian,
                    "also train the scalarized baseline critic");

    auto* eval = app.add_subcommand("eval", "evaluate a controller greedily");
    std::string mode = "lex";
    std::string thresholds_text;
    add_common(eval);
    eval->add_option("--mode", mode,
                     "controller: lex, lagrangian, or qN for the single critic N")
        ->capture_default_str();
    eval->add_option("--thresholds", thresholds_text,
                     "comma-separated raw chance thresholds (lex mode)");

    auto* oracle = app.add_subcommand("oracle", "exhaustive report for a tabular MDP file");
    std::string mdp_file;
    bool all_undominated = false;
    oracle->add_option("mdp_file", mdp_file, "tabular MDP text file")->required();
    oracle->add_flag("--all-undominated", all_undominated,
                     "also list every undominated policy");

    CLI11_PARSE(app, argc, argv);

    if (train->parsed()) {
        ConfigHandle config;
        if (const lexrl_status bad = make_config(config_path, out_dir, seed, seed_set, config)) {
            return fail(bad);
        }
        if (const lexrl_status bad = lexrl_train(config.get(), with_lagrangian ? 1 : 0)) {
            return fail(bad);
        }
        std::printf("weights and logs written to %s\n", lexrl_config_out_dir(config.get()));
        return 0;
    }

    if (eval->parsed()) {
        ConfigHandle config;
        if (const lexrl_status bad = make_config(config_path, out_dir, seed, seed_set, config)) {
            return fail(bad);
        }

        lexrl_eval_mode eval_mode = LEXRL_EVAL_LEX;
        int32_t channel = 0;
        if (mode == "lex") {
            eval_mode = LEXRL_EVAL_LEX;
        } else if (mode == "lagrangian") {
            eval_mode = LEXRL_EVAL_LAGRANGIAN;
        } else if (mode.size() >= 2 && mode[0] == 'q') {
            eval_mode = LEXRL_EVAL_SINGLE;
            try {
                channel = std::stoi(mode.substr(1));
            } catch (const std::exception&) {
                std::fprintf(stderr, "error: bad --mode '%s'\n", mode.c_str());
                return 1;
            }
        } else {
            std::fprintf(stderr, "error: bad --mode '%s' (use lex, lagrangian, or qN)\n",
                         mode.c_str());
            return 1;
        }

        std::vector<double> thresholds;
        try {
            thresholds = parse_thresholds(thresholds_text);
        } catch (const std::exception&) {
            std::fprintf(stderr, "error: cannot parse --thresholds '%s'\n",
                         thresholds_text.c_str());
            return 1;
        }

        lexrl_eval_summary summary{};
        if (const lexrl_status bad =
                lexrl_eval(config.get(), eval_mode, channel,
                           thresholds.empty() ? nullptr : thresholds.data(),
                           thresholds.size(), &summary)) {
            return fail(bad);
        }
        print_summary(summary);
        return 0;
    }

    char* report = nullptr;
    if (const lexrl_status bad =
            lexrl_oracle_report(mdp_file.c_str(), all_undominated ? 1 : 0, &report)) {
        return fail(bad);
    }
    std::printf("%s", report);
    lexrl_string_free(report);
    return 0;
}
