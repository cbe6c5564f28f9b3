#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "lexrl/cartpole.hpp"
#include "lexrl/training.hpp"

namespace lexrl {

/// Everything one reproduction run needs: plant parameters, trainer knobs,
/// agent thresholds, evaluation shape and output placement. All randomness
/// of a run derives from `seed`.
struct RunConfig {
    CartPole::Options cartpole;
    TrainerConfig trainer;
    bool hierarchical_training = false;
    std::vector<double> lagrangian_weights{1.0, 5.0, 25.0};
    int eval_episodes = 100;
    std::vector<double> eval_thresholds{0.05, 0.05};
    std::vector<double> position_bin_edges{-2.4, -1.0, -0.5, -0.25, -0.1,
                                           0.1,  0.25, 0.5,  1.0,   2.4};
    std::vector<double> angle_bin_edges{-0.21, -0.1, -0.06, -0.03, 0.03, 0.06, 0.1, 0.21};
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 1;

    void validate() const;
};

/// INI-style text: [section] headers, key = value pairs, '#' or ';'
/// comments. Every key has a default; unknown sections or keys are errors
/// (ParseError with file and line). See README for the full key list.
RunConfig parse_run_config(std::istream& in, const std::string& name);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace lexrl
