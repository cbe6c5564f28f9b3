#include "lexrl.h"

#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexrl/config.hpp"
#include "lexrl/errors.hpp"
#include "lexrl/harness.hpp"

struct lexrl_config {
    lexrl::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
lexrl_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        g_last_error.clear();
        return LEXRL_OK;
    } catch (const lexrl::FormatError& e) {
        g_last_error = e.what();
        return LEXRL_FORMAT_ERROR;
    } catch (const lexrl::ParseError& e) {
        g_last_error = e.what();
        return LEXRL_FORMAT_ERROR;
    } catch (const lexrl::IoError& e) {
        g_last_error = e.what();
        return LEXRL_IO_ERROR;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return LEXRL_INVALID_ARGUMENT;
    } catch (const std::out_of_range& e) {
        g_last_error = e.what();
        return LEXRL_INVALID_ARGUMENT;
    } catch (const std::logic_error& e) {
        g_last_error = e.what();
        return LEXRL_STATE_ERROR;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return LEXRL_INTERNAL_ERROR;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return LEXRL_INTERNAL_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return LEXRL_INTERNAL_ERROR;
    }
}

lexrl_status require(bool condition, const char* message) noexcept {
    if (condition) {
        return LEXRL_OK;
    }
    g_last_error = message;
    return LEXRL_INVALID_ARGUMENT;
}

void fill_summary(const lexrl::EvalSummary& summary, lexrl_eval_summary* out) {
    if (out == nullptr) {
        return;
    }
    out->pct_outside_position = summary.pct_outside_position;
    out->pct_outside_angle = summary.pct_outside_angle;
    out->mean_abs_force = summary.mean_abs_force;
    const std::size_t slots = sizeof out->usage_fraction / sizeof out->usage_fraction[0];
    const std::size_t used = summary.usage_fraction.size() < slots
                                 ? summary.usage_fraction.size()
                                 : slots;
    for (std::size_t i = 0; i < slots; ++i) {
        out->usage_fraction[i] = i < used ? summary.usage_fraction[i] : 0.0;
    }
    out->usage_count = static_cast<int32_t>(used);
    out->episodes = summary.episodes;
    out->steps_counted = summary.steps_counted;
}

}  // namespace

extern "C" {

const char* lexrl_last_error(void) { return g_last_error.c_str(); }

const char* lexrl_version(void) { return "1.0.0"; }

lexrl_status lexrl_config_default(lexrl_config** out) {
    if (const lexrl_status bad = require(out != nullptr, "out pointer is null")) {
        return bad;
    }
    return guarded([&] { *out = new lexrl_config{lexrl::RunConfig{}}; });
}

lexrl_status lexrl_config_load(const char* path, lexrl_config** out) {
    if (const lexrl_status bad = require(path != nullptr && out != nullptr,
                                         "path and out pointers must not be null")) {
        return bad;
    }
    return guarded([&] { *out = new lexrl_config{lexrl::load_run_config(path)}; });
}

lexrl_status lexrl_config_set_seed(lexrl_config* config, uint64_t seed) {
    if (const lexrl_status bad = require(config != nullptr, "config is null")) {
        return bad;
    }
    return guarded([&] { config->cfg.seed = seed; });
}

lexrl_status lexrl_config_set_out_dir(lexrl_config* config, const char* path) {
    if (const lexrl_status bad = require(config != nullptr && path != nullptr,
                                         "config and path must not be null")) {
        return bad;
    }
    return guarded([&] {
        if (*path == '\0') {
            throw std::invalid_argument("out_dir must not be empty");
        }
        config->cfg.out_dir = path;
    });
}

lexrl_status lexrl_config_set_episodes(lexrl_config* config, int32_t episodes) {
    if (const lexrl_status bad = require(config != nullptr, "config is null")) {
        return bad;
    }
    return guarded([&] {
        lexrl::RunConfig candidate = config->cfg;
        candidate.trainer.episodes = episodes;
        candidate.trainer.validate();
        config->cfg = candidate;
    });
}

lexrl_status lexrl_config_set_eval_episodes(lexrl_config* config, int32_t episodes) {
    if (const lexrl_status bad = require(config != nullptr, "config is null")) {
        return bad;
    }
    return guarded([&] {
        if (episodes < 1) {
            throw std::invalid_argument("eval episodes must be >= 1");
        }
        config->cfg.eval_episodes = episodes;
    });
}

const char* lexrl_config_out_dir(const lexrl_config* config) {
    if (config == nullptr) {
        return "";
    }
    return config->cfg.out_dir.c_str();
}

void lexrl_config_free(lexrl_config* config) { delete config; }

lexrl_status lexrl_train(const lexrl_config* config, int with_lagrangian) {
    if (const lexrl_status bad = require(config != nullptr, "config is null")) {
        return bad;
    }
    return guarded([&] { lexrl::cmd_train(config->cfg, with_lagrangian != 0); });
}

lexrl_status lexrl_eval(const lexrl_config* config, lexrl_eval_mode mode, int32_t channel,
                        const double* thresholds, size_t threshold_count,
                        lexrl_eval_summary* out_summary) {
    if (const lexrl_status bad = require(config != nullptr, "config is null")) {
        return bad;
    }
    if (const lexrl_status bad = require(thresholds != nullptr || threshold_count == 0,
                                         "thresholds is null but threshold_count > 0")) {
        return bad;
    }
    return guarded([&] {
        lexrl::EvalMode cpp_mode;
        switch (mode) {
            case LEXRL_EVAL_SINGLE:
                cpp_mode = lexrl::EvalMode::Single;
                break;
            case LEXRL_EVAL_LEX:
                cpp_mode = lexrl::EvalMode::Lex;
                break;
            case LEXRL_EVAL_LAGRANGIAN:
                cpp_mode = lexrl::EvalMode::Lagrangian;
                break;
            default:
                throw std::invalid_argument("unknown evaluation mode");
        }
        const std::vector<double> raw(thresholds, thresholds + threshold_count);
        const lexrl::EvalArtifacts artifacts =
            lexrl::cmd_eval(config->cfg, cpp_mode, channel, raw);
        fill_summary(artifacts.result.summary, out_summary);
    });
}

lexrl_status lexrl_oracle_report(const char* mdp_path, int all_undominated, char** out) {
    if (const lexrl_status bad = require(mdp_path != nullptr && out != nullptr,
                                         "mdp_path and out pointers must not be null")) {
        return bad;
    }
    return guarded([&] {
        const std::string report = lexrl::cmd_oracle(mdp_path, all_undominated != 0);
        char* copy = new char[report.size() + 1];
        std::memcpy(copy, report.c_str(), report.size() + 1);
        *out = copy;
    });
}

void lexrl_string_free(char* text) { delete[] text; }

}  // extern "C"
