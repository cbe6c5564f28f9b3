#include "lexrl/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "lexrl/errors.hpp"
#include "lexrl/text.hpp"

namespace lexrl {

namespace {

void check_bin_edges(const std::vector<double>& edges, const char* which) {
    if (edges.size() < 2) {
        throw std::invalid_argument(std::string("RunConfig: ") + which +
                                    " needs at least two bin edges");
    }
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i] < edges[i + 1])) {
            throw std::invalid_argument(std::string("RunConfig: ") + which +
                                        " bin edges must be strictly increasing");
        }
    }
}

struct ConfigReader {
    std::string name;
    int line = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(name + ":" + std::to_string(line) + ": " + message);
    }

    double number(const std::string& value, const std::string& key) const {
        try {
            return parse_double(value, key);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

    long long integer(const std::string& value, const std::string& key) const {
        try {
            return parse_int(value, key);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

    bool boolean(const std::string& value, const std::string& key) const {
        if (value == "true" || value == "yes" || value == "1") {
            return true;
        }
        if (value == "false" || value == "no" || value == "0") {
            return false;
        }
        fail(key + ": expected a boolean, got '" + value + "'");
    }

    std::vector<double> number_list(const std::string& value, const std::string& key) const {
        std::vector<double> out;
        if (trim(value).empty()) {
            return out;
        }
        for (const std::string& piece : split(value, ',')) {
            out.push_back(number(piece, key));
        }
        return out;
    }
};

void apply_key(RunConfig& config, const ConfigReader& reader, const std::string& section,
               const std::string& key, const std::string& value) {
    const std::string qualified = section + "." + key;

    if (section == "cartpole") {
        auto& opt = config.cartpole;
        if (key == "gravity") {
            opt.params.gravity = reader.number(value, qualified);
        } else if (key == "cart_mass") {
            opt.params.cart_mass = reader.number(value, qualified);
        } else if (key == "pole_mass") {
            opt.params.pole_mass = reader.number(value, qualified);
        } else if (key == "pole_half_length") {
            opt.params.length = reader.number(value, qualified);
        } else if (key == "dt") {
            opt.params.dt = reader.number(value, qualified);
        } else if (key == "position_limit") {
            opt.position_limit = reader.number(value, qualified);
        } else if (key == "angle_limit") {
            opt.angle_limit = reader.number(value, qualified);
        } else if (key == "angle_band") {
            opt.angle_band = reader.number(value, qualified);
        } else if (key == "position_band") {
            opt.position_band = reader.number(value, qualified);
        } else if (key == "terminal_penalty") {
            opt.terminal_penalty = reader.number(value, qualified);
        } else if (key == "init_range") {
            opt.init_range = reader.number(value, qualified);
        } else if (key == "charge_angle_on_next") {
            opt.charge_angle_on_next = reader.boolean(value, qualified);
        } else if (key == "charge_position_on_next") {
            opt.charge_position_on_next = reader.boolean(value, qualified);
        } else {
            reader.fail("unknown key '" + qualified + "'");
        }
        return;
    }

    if (section == "trainer") {
        auto& tr = config.trainer;
        if (key == "episodes") {
            tr.episodes = static_cast<int>(reader.integer(value, qualified));
        } else if (key == "steps_per_episode") {
            tr.steps_per_episode = static_cast<int>(reader.integer(value, qualified));
        } else if (key == "replay_period") {
            tr.replay_period = static_cast<int>(reader.integer(value, qualified));
        } else if (key == "tau") {
            tr.tau = reader.number(value, qualified);
        } else if (key == "gamma") {
            tr.gamma = reader.number(value, qualified);
        } else if (key == "minibatch_size") {
            tr.minibatch_size = static_cast<int>(reader.integer(value, qualified));
        } else if (key == "replay_capacity") {
            const long long capacity = reader.integer(value, qualified);
            if (capacity < 1) {
                reader.fail(qualified + ": must be positive");
            }
            tr.replay_capacity = static_cast<std::size_t>(capacity);
        } else if (key == "target_rule") {
            if (value == "dqn") {
                tr.target_rule = TargetRule::Dqn;
            } else if (value == "double_dqn") {
                tr.target_rule = TargetRule::DoubleDqn;
            } else {
                reader.fail(qualified + ": expected 'dqn' or 'double_dqn', got '" + value + "'");
            }
        } else if (key == "init_bias") {
            tr.init_bias = reader.number(value, qualified);
        } else if (key == "hierarchical") {
            config.hierarchical_training = reader.boolean(value, qualified);
        } else {
            reader.fail("unknown key '" + qualified + "'");
        }
        return;
    }

    if (section == "schedule") {
        auto& sched = config.trainer.schedules;
        if (key == "base_lr") {
            sched.base_lr = reader.number(value, qualified);
        } else if (key == "base_epsilon") {
            sched.base_epsilon = reader.number(value, qualified);
        } else if (key == "decay_rate") {
            sched.decay_rate = reader.number(value, qualified);
        } else if (key == "decay_onset") {
            sched.decay_onset = reader.integer(value, qualified);
        } else if (key == "unit") {
            if (value == "episode") {
                sched.unit = ScheduleConfig::Unit::Episode;
            } else if (value == "step") {
                sched.unit = ScheduleConfig::Unit::Step;
            } else {
                reader.fail(qualified + ": expected 'episode' or 'step', got '" + value + "'");
            }
        } else {
            reader.fail("unknown key '" + qualified + "'");
        }
        return;
    }

    if (section == "lagrangian") {
        if (key == "weights") {
            config.lagrangian_weights = reader.number_list(value, qualified);
        } else {
            reader.fail("unknown key '" + qualified + "'");
        }
        return;
    }

    if (section == "eval") {
        if (key == "episodes") {
            config.eval_episodes = static_cast<int>(reader.integer(value, qualified));
        } else if (key == "thresholds") {
            config.eval_thresholds = reader.number_list(value, qualified);
        } else if (key == "position_bins") {
            config.position_bin_edges = reader.number_list(value, qualified);
        } else if (key == "angle_bins") {
            config.angle_bin_edges = reader.number_list(value, qualified);
        } else {
            reader.fail("unknown key '" + qualified + "'");
        }
        return;
    }

    if (section == "run") {
        if (key == "seed") {
            const long long seed = reader.integer(value, qualified);
            if (seed < 0) {
                reader.fail(qualified + ": must be non-negative");
            }
            config.seed = static_cast<std::uint64_t>(seed);
        } else if (key == "out_dir") {
            if (value.empty()) {
                reader.fail(qualified + ": must not be empty");
            }
            config.out_dir = value;
        } else {
            reader.fail("unknown key '" + qualified + "'");
        }
        return;
    }

    reader.fail("unknown section '" + section + "'");
}

}  // namespace

void RunConfig::validate() const {
    trainer.validate();
    if (eval_episodes < 1) {
        throw std::invalid_argument("RunConfig: eval.episodes must be >= 1");
    }
    for (double k : eval_thresholds) {
        if (!std::isfinite(k) || k < 0.0) {
            throw std::invalid_argument("RunConfig: eval thresholds must be finite and >= 0");
        }
    }
    if (lagrangian_weights.empty()) {
        throw std::invalid_argument("RunConfig: lagrangian weights must not be empty");
    }
    for (double w : lagrangian_weights) {
        if (!std::isfinite(w)) {
            throw std::invalid_argument("RunConfig: lagrangian weights must be finite");
        }
    }
    check_bin_edges(position_bin_edges, "position");
    check_bin_edges(angle_bin_edges, "angle");
}

RunConfig parse_run_config(std::istream& in, const std::string& name) {
    RunConfig config;
    ConfigReader reader{name, 0};
    std::string raw;
    std::string section;

    while (std::getline(in, raw)) {
        ++reader.line;
        std::string_view view = raw;
        const std::size_t comment = view.find_first_of("#;");
        if (comment != std::string_view::npos) {
            view = view.substr(0, comment);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        if (view.front() == '[') {
            if (view.back() != ']' || view.size() < 3) {
                reader.fail("malformed section header '" + std::string(view) + "'");
            }
            section = std::string(trim(view.substr(1, view.size() - 2)));
            continue;
        }
        const std::size_t eq = view.find('=');
        if (eq == std::string_view::npos) {
            reader.fail("expected 'key = value', got '" + std::string(view) + "'");
        }
        const std::string key{trim(view.substr(0, eq))};
        const std::string value{trim(view.substr(eq + 1))};
        if (key.empty()) {
            reader.fail("empty key");
        }
        if (section.empty()) {
            reader.fail("key '" + key + "' appears before any [section] header");
        }
        apply_key(config, reader, section, key, value);
    }

    try {
        config.validate();
        CartPole probe(config.cartpole);
        (void)probe;
    } catch (const std::invalid_argument& e) {
        throw ParseError(name + ": " + e.what());
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return parse_run_config(in, path.filename().string());
}

}  // namespace lexrl
