#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lexrl/mdp_core.hpp"
#include "lexrl/neural.hpp"

namespace lexrl {

/// A frozen critic: maps a state to one Q estimate per action. Backed by a
/// trained network in production and by exact Q tables in verification.
using CriticFn = std::function<std::vector<double>(const StateVector&)>;

/// Frozen lexicographic agent: critics Q_0..Q_C ordered by ascending
/// priority index and the already-discounted bounds K_1..K_C. Stateless
/// after construction.
struct LexAgentConfig {
    std::vector<CriticFn> critics;
    std::vector<double> thresholds;
    int num_actions = 0;

    int num_constraints() const { return static_cast<int>(thresholds.size()); }
    void validate() const;
};

/// Result of Function 1: v is the number of met ordered constraints; sets
/// holds A_1..A_{min(v+1, C)} as ascending action-index lists. A_c is
/// non-empty for c <= v, and when v < C the final stored set A_{v+1} is the
/// empty set that stopped the scan.
struct ConstraintActionSets {
    int v = 0;
    std::vector<std::vector<int>> sets;
};

/// Nested filtering A_c = {u in A_{c-1} : Q_c(state, u) <= K_c} starting
/// from the full action set; the boundary Q_c == K_c counts as satisfied.
ConstraintActionSets constraint_action_sets(const StateVector& state,
                                            const LexAgentConfig& config);

struct LexSelection {
    int action = 0;
    int used_channel = 0;
};

/// Lexicographic action choice: with all C constraints met, the cheapest
/// action under Q_0 within A_C; otherwise the action in A_v minimizing the
/// first unmet channel Q_{v+1}. Ties break to the lowest action index.
LexSelection lex_select_action(const StateVector& state, const LexAgentConfig& config);

/// Binds frozen critics and converts each raw chance threshold through
/// discount_threshold. Requires one more critic than thresholds.
LexAgentConfig make_agent(std::vector<CriticFn> critics, std::span<const double> raw_thresholds,
                          double gamma, int num_actions);

/// Network-backed construction: critic c reads the environment's channel-c
/// feature map. The parameter sets are copied and frozen; rebuilding with
/// different thresholds reuses them without any training.
LexAgentConfig make_agent(const Environment& env, std::span<const MlpParameters> critics,
                          std::span<const double> raw_thresholds, double gamma);

/// A single network as a CriticFn through the given feature channel.
CriticFn network_critic(const Environment& env, MlpParameters params, int channel);

}  // namespace lexrl
